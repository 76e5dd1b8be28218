#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "memax/embedding.hpp"
#include "memax/resolver.hpp"

namespace memax {

/// Parameter value; monostate for a runtime parameter with no value yet.
using ParamValue = std::variant<std::monostate, std::string, std::int64_t, Decimal, std::vector<double>>;

struct SqlParam {
    ParamValue value;
    /// "text", "integer", "decimal", "vector", or "runtime:<name>" when unset.
    std::string type;
    std::optional<std::string> name;  // runtime parameter name

    friend bool operator==(const SqlParam&, const SqlParam&) = default;
};

/// Text form a driver binds for `value` (pgvector "[a,b,...]" for vectors).
std::optional<std::string> param_text(const ParamValue& value);

struct SqlArtifact {
    std::string sql;  // positional placeholders $1..$n
    std::vector<SqlParam> params;
    std::vector<std::string> warnings;

    friend bool operator==(const SqlArtifact&, const SqlArtifact&) = default;
};

/// Ordered parameters; an identical (type, value) pair, or the same runtime
/// name, reuses its placeholder.
class ParamRegistry {
public:
    /// 1-based placeholder index.
    std::size_t add(SqlParam param);
    const std::vector<SqlParam>& values() const noexcept { return values_; }
    std::vector<SqlParam> take() && { return std::move(values_); }

private:
    std::vector<SqlParam> values_;
    std::map<std::pair<std::string, std::string>, std::size_t> index_;
};

struct CompileOptions {
    /// Null selects the default 8-dimensional stub.
    const EmbeddingProvider* embedder = nullptr;
    /// Documentation aid: literals rendered inline instead of as placeholders.
    bool inline_literals = false;
    /// Values for runtime parameters such as sim.
    std::map<std::string, std::string, std::less<>> runtime_values;
};

/// SQL keywords that cannot appear as bare identifiers.
bool is_reserved_word(std::string_view word) noexcept;

/// Validates a table or column name. Throws memax::Error (Stage::Compile)
/// for reserved words and anything outside [A-Za-z_][A-Za-z0-9_]*.
std::string quote_identifier(std::string_view name);

/// Renders expressions of one query, registering parameters as it goes.
class ExprRenderer {
public:
    ExprRenderer(const ResolvedQuery& query, ParamRegistry& params, const CompileOptions& options);

    std::string expr(const Expr& e);

    /// "lhs cmp rhs", an IN list for "=" against several literals, or a
    /// parenthesized OR chain. Vector-operator expressions render as
    /// "(alias.column OP $k::VECTOR)".
    std::string predicate(const Predicate& p);

    std::string projection(const Projection& p);

    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

private:
    std::string literal(const ParamValue& value, std::string type);
    std::string runtime(const RuntimeParam& p);
    const std::vector<double>& embedding(const std::string& text);

    const ResolvedQuery& query_;
    ParamRegistry& params_;
    const CompileOptions& options_;
    std::map<std::string, std::vector<double>> embedded_;
    std::vector<std::string> warnings_;
};

std::string_view sql_comparator(Comparator cmp) noexcept;
std::string_view sql_aggregate(FuncTag tag) noexcept;

/// Appends LIMIT / OFFSET.
std::string apply_meta(std::string sql, const ResolvedMeta& meta);

/// SELECT .. FROM .. [WHERE] [GROUP BY] [ORDER BY] [LIMIT] [OFFSET].
/// Throws memax::Error (Stage::Compile).
SqlArtifact compile(const ResolvedQuery& query, const CompileOptions& options = {});

/// {"params": [...], "types": [...]}
std::string params_json(const SqlArtifact& artifact);

}  // namespace memax
