#include "memax_cli/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "memax/memax.hpp"
#include "memax_cli/pg.hpp"

namespace memax::cli {

namespace {

constexpr int kUsageError = 64;

struct Options {
    std::string source;
    std::string file;
    std::string emit = "sql";
    std::vector<std::string> params;
    std::string embed;
    bool exec = false;
    std::string db;
    bool inline_literals = false;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_all(std::istream& in) {
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string load_source(const Options& opt, const CLI::App& app, std::istream& in) {
    const bool positional = app.count("source") > 0;
    if (positional && !opt.file.empty()) throw UsageError("give the query either as an argument or with -f, not both");
    if (positional) return opt.source;
    if (!opt.file.empty()) {
        std::ifstream f(opt.file, std::ios::binary);
        if (!f) throw UsageError("cannot open " + opt.file);
        return read_all(f);
    }
    return read_all(in);
}

std::map<std::string, std::string, std::less<>> parse_params(const std::vector<std::string>& raw) {
    std::map<std::string, std::string, std::less<>> out;
    for (const auto& p : raw) {
        const auto eq = p.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--param expects name=value, got '" + p + "'");
        std::string name = p.substr(0, eq);
        if (name.front() == '$') name.erase(0, 1);
        out[name] = p.substr(eq + 1);
    }
    return out;
}

std::unique_ptr<EmbeddingProvider> make_embedder(const Options& opt, const Io& io) {
    try {
        auto config = EmbeddingConfig::from_env(io.getenv);
        if (!opt.embed.empty()) config.mode = *parse_embed_mode(opt.embed);
        return make_provider(config);
    } catch (const EmbeddingError& e) {
        throw UsageError(e.what());
    }
}

void print_rows(std::ostream& out, std::size_t statement, const ResultSet& rs) {
    out << nlohmann::ordered_json{{"statement", statement}, {"columns", rs.columns}}.dump() << '\n';
    for (const auto& row : rs.rows) {
        nlohmann::json line = nlohmann::json::array();
        for (const auto& v : row) line.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
        out << line.dump() << '\n';
    }
}

int execute(const std::vector<SqlArtifact>& artifacts, const Options& opt, const Io& io) {
    std::string conninfo = opt.db;
    if (conninfo.empty()) conninfo = io.getenv("DB_URL").value_or("");
    if (conninfo.empty()) throw Error(Stage::Execute, "no database configured");

    std::unique_ptr<PgConnection> conn;
    try {
        conn = std::make_unique<PgConnection>(conninfo);
    } catch (const std::runtime_error& e) {
        throw Error(Stage::Execute, e.what());
    }
    for (std::size_t i = 0; i < artifacts.size(); ++i) {
        std::vector<std::optional<std::string>> values;
        for (const auto& p : artifacts[i].params) values.push_back(param_text(p.value));
        try {
            print_rows(io.out, i, conn->exec(artifacts[i].sql, values));
        } catch (const std::runtime_error& e) {
            throw Error(Stage::Execute, "statement " + std::to_string(i) + ": " + e.what());
        }
    }
    return 0;
}

int pipeline(const Options& opt, const CLI::App& app, Io& io) {
    if (opt.exec && opt.emit != "sql") throw UsageError("--exec runs compiled SQL; it cannot be combined with --emit " + opt.emit);
    if (opt.exec && opt.inline_literals) throw UsageError("--exec binds parameters; drop --inline-literals");

    const std::string source = load_source(opt, app, io.in);
    const auto tokens = lex(source);
    if (opt.emit == "tokens") {
        io.out << format_tokens(tokens);
        return 0;
    }

    const auto query = parse(tokens);
    if (opt.emit == "coords") {
        io.out << format_coordinates(query);
        return 0;
    }
    if (opt.emit == "ast") {
        io.out << ast_json(query) << '\n';
        return 0;
    }

    ResolveOptions resolve_options;
    CompileOptions compile_options;
    compile_options.runtime_values = parse_params(opt.params);
    for (const auto& [name, value] : compile_options.runtime_values) resolve_options.runtime_params.insert(name);

    const auto resolved = resolve(query, resolve_options);
    if (opt.emit == "resolved") {
        io.out << resolved_json(resolved) << '\n';
        return 0;
    }

    const auto embedder = make_embedder(opt, io);
    compile_options.embedder = embedder.get();
    compile_options.inline_literals = opt.inline_literals;

    std::vector<SqlArtifact> artifacts;
    for (const auto& q : resolved) artifacts.push_back(compile(q, compile_options));
    for (const auto& a : artifacts) {
        for (const auto& w : a.warnings) io.err << "warning: " << w << '\n';
    }

    if (opt.exec) return execute(artifacts, opt, io);

    for (std::size_t i = 0; i < artifacts.size(); ++i) {
        if (i) io.out << '\n';
        io.out << artifacts[i].sql << '\n' << params_json(artifacts[i]) << '\n';
    }
    return 0;
}

}  // namespace

std::optional<std::string> system_getenv(std::string_view name) {
    const char* v = std::getenv(std::string(name).c_str());
    if (!v) return std::nullopt;
    return std::string(v);
}

int run(const std::vector<std::string>& args, Io io) {
    Options opt;
    CLI::App app{"Compile Memelang queries to parameterized PostgreSQL", args.empty() ? "memax" : args.front()};
    app.add_option("source", opt.source, "Query text (default: read stdin)");
    app.add_option("-f,--file", opt.file, "Read the query from a file");
    app.add_option("--emit", opt.emit, "Pipeline stage to print")
        ->check(CLI::IsMember({"tokens", "coords", "ast", "resolved", "sql"}));
    app.add_option("--param", opt.params, "Runtime parameter name=value (repeatable)")->allow_extra_args(false);
    app.add_option("--embed", opt.embed, "Embedding provider, overrides EMBED_MODE")
        ->check(CLI::IsMember({"stub", "http"}));
    app.add_flag("--exec", opt.exec, "Execute the compiled statements");
    app.add_option("--db", opt.db, "libpq connection string (default: DB_URL)");
    app.add_flag("--inline-literals", opt.inline_literals, "Render literals inline (not executable)");

    try {
        std::vector<std::string> rest(args.rbegin(), args.rend());
        if (!rest.empty()) rest.pop_back();
        app.parse(rest);
    } catch (const CLI::CallForHelp&) {
        io.out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        io.err << e.what() << '\n' << "run with --help for usage\n";
        return kUsageError;
    }

    try {
        return pipeline(opt, app, io);
    } catch (const Error& e) {
        io.err << e.describe() << '\n';
        return exit_code(e.stage());
    } catch (const UsageError& e) {
        io.err << "usage error: " << e.what() << '\n';
        return kUsageError;
    }
}

}  // namespace memax::cli
