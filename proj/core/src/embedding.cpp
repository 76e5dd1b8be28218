#include "memax/embedding.hpp"

#include <charconv>
#include <cmath>

#include <httplib.h>
#include <json.hpp>

namespace memax {

namespace {

std::uint64_t fnv1a(std::string_view text, std::uint64_t seed) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

StubEmbedding::StubEmbedding(std::size_t dimensions, std::uint64_t seed) : dimensions_(dimensions), seed_(seed) {
    if (dimensions_ == 0) throw EmbeddingError("embedding dimensions must be positive");
}

std::vector<double> StubEmbedding::embed(std::string_view text) const {
    if (text.empty()) throw EmbeddingError("cannot embed empty text");
    std::vector<double> out(dimensions_);
    std::uint64_t state = fnv1a(text, seed_);
    for (auto& component : out) {
        state = splitmix64(state);
        // 53 random mantissa bits mapped onto [-1, 1].
        component = static_cast<double>(state >> 11) / static_cast<double>(1ULL << 53) * 2.0 - 1.0;
    }
    return out;
}

HttpEmbedding::HttpEmbedding(std::string endpoint, std::size_t dimensions, std::chrono::milliseconds timeout)
    : dimensions_(dimensions), timeout_(timeout) {
    if (dimensions_ == 0) throw EmbeddingError("embedding dimensions must be positive");
    const std::string_view scheme = "http://";
    if (endpoint.rfind(scheme, 0) != 0) {
        throw EmbeddingError("embedding endpoint must be an http:// URL: " + endpoint);
    }
    const auto slash = endpoint.find('/', scheme.size());
    base_ = endpoint.substr(0, slash);
    path_ = slash == std::string::npos ? "/" : endpoint.substr(slash);
    if (base_.size() == scheme.size()) throw EmbeddingError("embedding endpoint has no host: " + endpoint);
}

std::vector<double> HttpEmbedding::embed(std::string_view text) const {
    if (text.empty()) throw EmbeddingError("cannot embed empty text");
    const std::string body = nlohmann::json{{"input", text}}.dump();

    // A fresh client per call keeps embed() safe to call concurrently.
    httplib::Client client(base_);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);

    httplib::Result res;
    for (int attempt = 0; attempt < 2; ++attempt) {
        res = client.Post(path_, body, "application/json");
        const bool transient = !res || res->status >= 500;
        if (!transient) break;
    }
    if (!res) throw EmbeddingError("embedding provider unreachable: " + httplib::to_string(res.error()));
    if (res->status != 200) {
        throw EmbeddingError("embedding provider returned HTTP " + std::to_string(res->status));
    }

    const auto doc = nlohmann::json::parse(res->body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("embedding") || !doc["embedding"].is_array()) {
        throw EmbeddingError("embedding provider response lacks an \"embedding\" array");
    }
    std::vector<double> out;
    out.reserve(doc["embedding"].size());
    for (const auto& v : doc["embedding"]) {
        if (!v.is_number()) throw EmbeddingError("embedding component is not a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw EmbeddingError("embedding component is not finite");
        out.push_back(d);
    }
    if (out.size() != dimensions_) {
        throw EmbeddingError("embedding dimension mismatch: expected " + std::to_string(dimensions_) + ", got " +
                             std::to_string(out.size()));
    }
    return out;
}

std::optional<EmbeddingConfig::Mode> parse_embed_mode(std::string_view text) noexcept {
    if (text == "stub") return EmbeddingConfig::Mode::Stub;
    if (text == "http") return EmbeddingConfig::Mode::Http;
    return std::nullopt;
}

EmbeddingConfig EmbeddingConfig::from_env(
    const std::function<std::optional<std::string>(std::string_view)>& getenv) {
    EmbeddingConfig config;
    if (auto mode = getenv("EMBED_MODE")) {
        auto parsed = parse_embed_mode(*mode);
        if (!parsed) throw EmbeddingError("EMBED_MODE must be stub or http, got '" + *mode + "'");
        config.mode = *parsed;
    }
    if (auto endpoint = getenv("EMBED_ENDPOINT")) config.endpoint = *endpoint;
    if (auto dim = getenv("EMBED_DIM")) {
        std::size_t n = 0;
        auto [p, ec] = std::from_chars(dim->data(), dim->data() + dim->size(), n);
        if (ec != std::errc{} || p != dim->data() + dim->size() || n == 0) {
            throw EmbeddingError("EMBED_DIM must be a positive integer, got '" + *dim + "'");
        }
        config.dimensions = n;
    }
    return config;
}

std::unique_ptr<EmbeddingProvider> make_provider(const EmbeddingConfig& config) {
    switch (config.mode) {
        case EmbeddingConfig::Mode::Stub: return std::make_unique<StubEmbedding>(config.dimensions);
        case EmbeddingConfig::Mode::Http:
            if (config.endpoint.empty()) throw EmbeddingError("EMBED_ENDPOINT is required for http embeddings");
            return std::make_unique<HttpEmbedding>(config.endpoint, config.dimensions);
    }
    throw EmbeddingError("unknown embedding mode");
}

}  // namespace memax
