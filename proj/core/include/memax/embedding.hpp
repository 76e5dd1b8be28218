#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace memax {

class EmbeddingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Turns the quoted text operand of a vector operator into a vector
/// parameter. embed() must be callable from several threads at once.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    virtual std::string_view name() const noexcept = 0;
    virtual std::size_t dimensions() const noexcept = 0;

    /// Throws EmbeddingError.
    virtual std::vector<double> embed(std::string_view text) const = 0;
};

/// Deterministic, model-free provider: a seeded hash of the text expanded
/// into `dimensions` components in [-1, 1].
class StubEmbedding final : public EmbeddingProvider {
public:
    static constexpr std::size_t kDefaultDimensions = 8;

    explicit StubEmbedding(std::size_t dimensions = kDefaultDimensions, std::uint64_t seed = 0);

    std::string_view name() const noexcept override { return "stub"; }
    std::size_t dimensions() const noexcept override { return dimensions_; }
    std::vector<double> embed(std::string_view text) const override;

private:
    std::size_t dimensions_;
    std::uint64_t seed_;
};

/// POST {"input": text} to `endpoint`, expecting {"embedding": [...]}.
/// Retries once on a connection failure or 5xx response.
class HttpEmbedding final : public EmbeddingProvider {
public:
    HttpEmbedding(std::string endpoint, std::size_t dimensions,
                  std::chrono::milliseconds timeout = std::chrono::seconds(10));

    std::string_view name() const noexcept override { return "http"; }
    std::size_t dimensions() const noexcept override { return dimensions_; }
    std::vector<double> embed(std::string_view text) const override;

private:
    std::string base_;  // scheme://host[:port]
    std::string path_;
    std::size_t dimensions_;
    std::chrono::milliseconds timeout_;
};

struct EmbeddingConfig {
    enum class Mode { Stub, Http };

    Mode mode = Mode::Stub;
    std::string endpoint;
    std::size_t dimensions = StubEmbedding::kDefaultDimensions;

    /// Reads EMBED_MODE, EMBED_ENDPOINT, EMBED_DIM through `getenv`.
    static EmbeddingConfig from_env(const std::function<std::optional<std::string>(std::string_view)>& getenv);
};

std::optional<EmbeddingConfig::Mode> parse_embed_mode(std::string_view text) noexcept;

/// Throws EmbeddingError on an invalid configuration.
std::unique_ptr<EmbeddingProvider> make_provider(const EmbeddingConfig& config);

}  // namespace memax
