#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "memax/axial.hpp"
#include "memax/ir.hpp"

namespace memax {

struct TableInstance {
    std::string table;
    std::size_t ordinal = 0;
    Coordinate introduced_at;

    std::string alias() const { return "t" + std::to_string(ordinal); }
    friend bool operator==(const TableInstance&, const TableInstance&) = default;
};

struct Decimal {
    std::string text;
    friend bool operator==(const Decimal&, const Decimal&) = default;
};

using LiteralValue = std::variant<std::string, std::int64_t, Decimal, std::vector<double>>;

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct ColumnRef {
    std::size_t instance = 0;
    std::string column;  // empty when star
    bool star = false;
    friend bool operator==(const ColumnRef&, const ColumnRef&) = default;
};

struct Literal {
    LiteralValue value;
    friend bool operator==(const Literal&, const Literal&) = default;
};

/// Quoted text operand of a vector operator; embedded at compile time.
struct EmbedText {
    std::string text;
    friend bool operator==(const EmbedText&, const EmbedText&) = default;
};

/// Value supplied by the runtime, e.g. $sim.
struct RuntimeParam {
    std::string name;
    friend bool operator==(const RuntimeParam&, const RuntimeParam&) = default;
};

struct BinaryExpr {
    std::string op;
    ExprPtr lhs;
    ExprPtr rhs;
    friend bool operator==(const BinaryExpr& a, const BinaryExpr& b);
};

struct Expr {
    std::variant<ColumnRef, Literal, EmbedText, RuntimeParam, BinaryExpr> node;

    template <class T>
    const T* as() const noexcept { return std::get_if<T>(&node); }

    friend bool operator==(const Expr&, const Expr&) = default;
};

inline bool operator==(const BinaryExpr& a, const BinaryExpr& b) {
    return a.op == b.op && *a.lhs == *b.lhs && *a.rhs == *b.rhs;
}

bool is_vector_op(std::string_view op) noexcept;

struct Projection {
    Expr expr;
    std::optional<FuncTag> aggregate;
    bool grouping = false;
    Coordinate origin;
    friend bool operator==(const Projection&, const Projection&) = default;
};

/// lhs cmp rhs[0] OR lhs cmp rhs[1] ...
struct Predicate {
    Expr lhs;
    Comparator cmp = Comparator::Eq;
    std::vector<Expr> rhs;
    Coordinate origin;
    friend bool operator==(const Predicate&, const Predicate&) = default;
};

struct OrderSpec {
    std::size_t projection = 0;
    bool descending = false;
    friend bool operator==(const OrderSpec&, const OrderSpec&) = default;
};

struct ResolvedMeta {
    std::optional<std::int64_t> lim;
    std::optional<std::int64_t> off;
    std::optional<Expr> sim;
    friend bool operator==(const ResolvedMeta&, const ResolvedMeta&) = default;
};

struct ResolvedQuery {
    std::vector<TableInstance> instances;
    std::vector<Projection> projections;
    std::vector<Predicate> predicates;
    std::vector<OrderSpec> order;
    ResolvedMeta meta;
    /// Runtime parameter names in first-reference order.
    std::vector<std::string> params;

    bool grouped() const noexcept;
    friend bool operator==(const ResolvedQuery&, const ResolvedQuery&) = default;
};

/// Resolved slots of one vector, as seen by a later `@`.
struct VectorResolution {
    std::size_t instance = 0;
    ColumnRef column;
    Expr value;
    std::optional<Literal> literal;  // set when the value slot is "= literal"
    Coordinate at;
};

struct ResolveOptions {
    /// Variable names the runtime supplies; `$name` resolves to a parameter
    /// when not bound inside the matrix.
    std::set<std::string, std::less<>> runtime_params{"sim"};
};

/// Resolves matrices in source order. `^` refers to the matrix resolved
/// just before the current one. Throws memax::Error (Stage::Resolve, or
/// Stage::Compile for a `^` that cannot be parameterized).
class Resolver {
public:
    explicit Resolver(ResolveOptions options = {});

    ResolvedQuery resolve(const MatrixIR& matrix);

private:
    struct MatrixSummary {
        std::string table;
        ColumnRef column;
        std::optional<Literal> literal;
    };

    ResolveOptions options_;
    std::optional<MatrixSummary> previous_;
};

std::vector<ResolvedQuery> resolve(const Query& query, const ResolveOptions& options = {});

/// `@` in the value slot: the prior vector's value expression.
Expr resolve_value_same(const VectorResolution* prior, Span at);

/// Gives every projection of a grouped query exactly one of grouping key or
/// aggregate; untagged projections get :last. Predicates are untouched.
ResolvedQuery complete_grouping(ResolvedQuery query);

}  // namespace memax
