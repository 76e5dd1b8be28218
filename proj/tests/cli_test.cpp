#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "memax/memax.hpp"
#include "memax_cli/cli.hpp"
#include "support/golden.hpp"

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args, std::string stdin_text = "", std::map<std::string, std::string> env = {}) {
    args.insert(args.begin(), "memax");
    std::istringstream in(stdin_text);
    std::ostringstream out, err;
    const auto getenv = [env](std::string_view k) -> std::optional<std::string> {
        auto it = env.find(std::string(k));
        return it == env.end() ? std::nullopt : std::optional<std::string>(it->second);
    };
    const int code = memax::cli::run(args, {in, out, err, getenv});
    return {code, out.str(), err.str()};
}

std::string expected_sql_output(std::string_view sql, std::string_view params) {
    return std::string(sql) + "\n" + std::string(params) + "\n";
}

}  // namespace

TEST(Cli, DefaultEmitsSqlAndParams) {
    const auto r = run({std::string(memax::golden::kScalarSource)});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, expected_sql_output(memax::golden::kScalarSql, memax::golden::kScalarParams));
    EXPECT_EQ(r.err, "");
}

TEST(Cli, CoordsEmit) {
    const auto r = run({"--emit", "coords", std::string(memax::golden::kScalarSource)});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, memax::golden::kScalarCoords);
}

TEST(Cli, ReadsStdinAndFile) {
    EXPECT_EQ(run({}, std::string(memax::golden::kScalarSource)).out,
              expected_sql_output(memax::golden::kScalarSql, memax::golden::kScalarParams));

    const std::string path = ::testing::TempDir() + "memax_cli_test.mql";
    {
        std::ofstream f(path);
        f << memax::golden::kCostarSource;
    }
    const auto r = run({"-f", path});
    std::remove(path.c_str());
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, expected_sql_output(memax::golden::kCostarSql, memax::golden::kCostarParams));

    EXPECT_EQ(run({"-f", "/nonexistent/x.mql"}).code, 64);
    EXPECT_EQ(run({"-f", path, "movies title _;;"}).code, 64);
}

TEST(Cli, EmitStages) {
    const std::string src(memax::golden::kScalarSource);
    const auto tokens = run({"--emit", "tokens", src});
    EXPECT_EQ(tokens.out.substr(0, tokens.out.find('\n')), "ALNUM\tmovies\t0..6");

    const auto ast = nlohmann::json::parse(run({"--emit", "ast", src}).out);
    const auto& limit = ast.at("matrices").at(0).at("vectors").at(0).at("limits").at(2);
    for (const char* key : {"left", "funcs", "cmp", "right"}) EXPECT_TRUE(limit.contains(key)) << key;
    EXPECT_EQ(limit.at("cmp"), "<");
    EXPECT_TRUE(ast.at("matrices").at(0).contains("meta"));

    const auto resolved = nlohmann::json::parse(run({"--emit", "resolved", src}).out);
    EXPECT_EQ(resolved.at("statements").at(0).at("instances").at(0).at("alias"), "t0");

    EXPECT_EQ(run({"--emit", "bogus", src}).code, 64);
}

TEST(Cli, GroupedWithRuntimeParam) {
    const std::string src(memax::golden::kGroupedSource);
    const auto unset = run({src});
    EXPECT_EQ(unset.code, 0);
    EXPECT_NE(unset.err.find("runtime parameter $sim has no value"), std::string::npos);
    const auto params = nlohmann::json::parse(unset.out.substr(unset.out.find('\n') + 1));
    EXPECT_EQ(params.at("types").at(2), "runtime:sim");
    EXPECT_TRUE(params.at("params").at(2).is_null());

    const auto set = run({"--param", "sim=0.3", src});
    EXPECT_EQ(set.err, "");
    const auto p2 = nlohmann::json::parse(set.out.substr(set.out.find('\n') + 1));
    EXPECT_DOUBLE_EQ(p2.at("params").at(2).get<double>(), 0.3);

    EXPECT_EQ(run({"--param", "sim", src}).code, 64);
}

TEST(Cli, ParamMakesVariableRuntime) {
    const auto r = run({"--param", "floor=5", "movies year >$floor;;"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "SELECT t0.year FROM movies AS t0 WHERE t0.year > $1\n{\"params\":[5],\"types\":[\"integer\"]}\n");
}

TEST(Cli, MultipleMatricesSeparatedByBlankLine) {
    const auto r = run({"movies title _;; roles actor _;;"});
    EXPECT_EQ(r.out,
              "SELECT t0.title FROM movies AS t0\n{\"params\":[],\"types\":[]}\n\n"
              "SELECT t0.actor FROM roles AS t0\n{\"params\":[],\"types\":[]}\n");
}

TEST(Cli, InlineLiterals) {
    EXPECT_EQ(run({"--inline-literals", std::string(memax::golden::kScalarSource)}).out.substr(0, 64),
              "SELECT t0.year, t0.title FROM movies AS t0 WHERE t0.year < 1970\n");
}

TEST(Cli, EmbedModes) {
    const std::string src(memax::golden::kCosineSource);
    const auto dim = run({src}, "", {{"EMBED_DIM", "3"}});
    const auto params = nlohmann::json::parse(dim.out.substr(dim.out.find('\n') + 1));
    EXPECT_EQ(params.at("params").at(0).size(), 3u);

    // --embed overrides EMBED_MODE.
    EXPECT_EQ(run({"--embed", "stub", src}, "", {{"EMBED_MODE", "http"}}).code, 0);
    // http without an endpoint is a configuration error.
    EXPECT_EQ(run({"--embed", "http", src}).code, 64);
    // Unreachable provider fails the compile stage.
    const auto down = run({"--embed", "http", src}, "", {{"EMBED_ENDPOINT", "http://127.0.0.1:1/embed"}});
    EXPECT_EQ(down.code, 3);
    EXPECT_EQ(down.err.rfind("compile error", 0), 0u) << down.err;
}

TEST(Cli, StageExitCodes) {
    const std::pair<const char*, int> cases[] = {
        {"movies title \"open;;", 1},   {"movies year title <1;;", 1}, {"movies year <1970>3;;", 1},
        {"roles actor !=$zzz;;", 2},    {"@ year _;;", 2},             {"select year _;;", 3},
        {"movies title _;; ^ ^ ^;;", 3},
    };
    for (const auto& [src, code] : cases) {
        const auto r = run({src});
        EXPECT_EQ(r.code, code) << src << "\n" << r.err;
        EXPECT_TRUE(r.out.empty()) << src;
        EXPECT_NE(r.err.find(" error at "), std::string::npos) << r.err;
    }
    const auto unbound = run({"roles actor !=$zzz;;"});
    EXPECT_EQ(unbound.err, "resolve error at 14..18: unbound variable $zzz\n");
}

TEST(Cli, StageToExitCodeMap) {
    using memax::Stage;
    EXPECT_EQ(memax::exit_code(Stage::Lex), 1);
    EXPECT_EQ(memax::exit_code(Stage::Parse), 1);
    EXPECT_EQ(memax::exit_code(Stage::Resolve), 2);
    EXPECT_EQ(memax::exit_code(Stage::Compile), 3);
    EXPECT_EQ(memax::exit_code(Stage::Execute), 4);
}

TEST(Cli, ExecWithoutDatabase) {
    const auto r = run({"--exec", std::string(memax::golden::kScalarSource)});
    EXPECT_EQ(r.code, 4);
    EXPECT_NE(r.err.find("no database configured"), std::string::npos);
    EXPECT_TRUE(r.out.empty());
}

TEST(Cli, ExecConnectionFailure) {
    const auto r = run({"--exec", "--db", "postgresql://127.0.0.1:1/none?connect_timeout=2",
                        std::string(memax::golden::kScalarSource)});
    EXPECT_EQ(r.code, 4);
    EXPECT_EQ(r.err.rfind("execute error", 0), 0u) << r.err;
}

TEST(Cli, ExecFlagConflicts) {
    EXPECT_EQ(run({"--exec", "--emit", "ast", "x;;"}).code, 64);
    EXPECT_EQ(run({"--exec", "--inline-literals", "x;;"}).code, 64);
}

TEST(Cli, Help) {
    const auto r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("--emit"), std::string::npos);
}
