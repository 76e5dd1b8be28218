#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>

#include "memax/sql.hpp"

namespace memax {

namespace {

[[noreturn]] void fail(const std::string& message) { throw Error(Stage::Compile, message); }

// PostgreSQL reserved key words, including those that may only be used as
// function or type names.
constexpr std::string_view kReserved[] = {
    "all", "analyse", "analyze", "and", "any", "array", "as", "asc", "asymmetric", "authorization", "binary",
    "both", "case", "cast", "check", "collate", "collation", "column", "concurrently", "constraint", "create",
    "cross", "current_catalog", "current_date", "current_role", "current_schema", "current_time",
    "current_timestamp", "current_user", "default", "deferrable", "desc", "distinct", "do", "else", "end",
    "except", "false", "fetch", "for", "foreign", "freeze", "from", "full", "grant", "group", "having", "ilike",
    "in", "initially", "inner", "intersect", "into", "is", "isnull", "join", "lateral", "leading", "left", "like",
    "limit", "localtime", "localtimestamp", "natural", "not", "notnull", "null", "offset", "on", "only", "or",
    "order", "outer", "overlaps", "placing", "primary", "references", "returning", "right", "select",
    "session_user", "similar", "some", "symmetric", "system_user", "table", "tablesample", "then", "to",
    "trailing", "true", "union", "unique", "user", "using", "variadic", "verbose",
};

std::string format_double(double v) {
    std::array<char, 32> buf{};
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ec == std::errc{} ? p : buf.data());
}

std::string vector_text(const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += format_double(v[i]);
    }
    return out + "]";
}

bool is_integer_text(std::string_view s) {
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) s.remove_prefix(1);
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

bool is_decimal_text(std::string_view s) {
    const auto dot = s.find('.');
    if (dot == std::string_view::npos) return false;
    auto frac = s.substr(dot + 1);
    return is_integer_text(s.substr(0, dot)) && !frac.empty() &&
           std::all_of(frac.begin(), frac.end(), [](unsigned char c) { return std::isdigit(c); });
}

SqlParam typed_runtime_value(const std::string& name, const std::string& text) {
    if (is_integer_text(text)) {
        std::string_view s = text;
        if (s.front() == '+') s.remove_prefix(1);
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec == std::errc{} && p == s.data() + s.size()) return SqlParam{v, "integer", name};
    }
    if (is_decimal_text(text)) return SqlParam{Decimal{text}, "decimal", name};
    return SqlParam{text, "text", name};
}

std::string type_of(const LiteralValue& v) {
    switch (v.index()) {
        case 0: return "text";
        case 1: return "integer";
        case 2: return "decimal";
        default: return "vector";
    }
}

ParamValue to_param(const LiteralValue& v) {
    return std::visit([](const auto& x) -> ParamValue { return x; }, v);
}

std::string inline_text(const ParamValue& value) {
    if (const auto* s = std::get_if<std::string>(&value)) {
        std::string out = "'";
        for (char c : *s) {
            if (c == '\'') out += '\'';
            out += c;
        }
        return out + "'";
    }
    if (std::holds_alternative<std::vector<double>>(value)) return "'" + *param_text(value) + "'";
    return param_text(value).value_or("NULL");
}

}  // namespace

std::optional<std::string> param_text(const ParamValue& value) {
    struct Visitor {
        std::optional<std::string> operator()(std::monostate) const { return std::nullopt; }
        std::optional<std::string> operator()(const std::string& s) const { return s; }
        std::optional<std::string> operator()(std::int64_t v) const { return std::to_string(v); }
        std::optional<std::string> operator()(const Decimal& d) const { return d.text; }
        std::optional<std::string> operator()(const std::vector<double>& v) const { return vector_text(v); }
    };
    return std::visit(Visitor{}, value);
}

std::size_t ParamRegistry::add(SqlParam param) {
    std::pair<std::string, std::string> key{
        param.type, param.name ? "runtime:" + *param.name : "value:" + param_text(param.value).value_or("")};
    if (auto it = index_.find(key); it != index_.end()) return it->second;
    values_.push_back(std::move(param));
    index_.emplace(std::move(key), values_.size());
    return values_.size();
}

bool is_reserved_word(std::string_view word) noexcept {
    std::string lower(word);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    return std::find(std::begin(kReserved), std::end(kReserved), lower) != std::end(kReserved);
}

std::string quote_identifier(std::string_view name) {
    const auto ident_start = [](unsigned char c) { return std::isalpha(c) || c == '_'; };
    const auto ident_char = [](unsigned char c) { return std::isalnum(c) || c == '_'; };
    if (name.empty() || !ident_start(static_cast<unsigned char>(name.front()))) {
        fail("illegal identifier '" + std::string(name) + "'");
    }
    if (!std::all_of(name.begin(), name.end(), [&](char c) { return ident_char(static_cast<unsigned char>(c)); })) {
        fail("illegal identifier '" + std::string(name) + "'");
    }
    if (is_reserved_word(name)) fail("identifier '" + std::string(name) + "' is a reserved word");
    return std::string(name);
}

std::string_view sql_comparator(Comparator cmp) noexcept {
    switch (cmp) {
        case Comparator::Eq: return "=";
        case Comparator::Ne: return "!=";
        case Comparator::Gt: return ">";
        case Comparator::Ge: return ">=";
        case Comparator::Lt: return "<";
        case Comparator::Le: return "<=";
        case Comparator::Match: return "~*";
        case Comparator::NotMatch: return "!~*";
    }
    return "=";
}

std::string_view sql_aggregate(FuncTag tag) noexcept {
    switch (tag) {
        case FuncTag::Sum: return "SUM";
        case FuncTag::Cnt: return "COUNT";
        case FuncTag::Min: return "MIN";
        case FuncTag::Max: return "MAX";
        case FuncTag::Avg: return "AVG";
        // No portable "last value" aggregate; MAX keeps grouped queries valid.
        case FuncTag::Last: return "MAX";
        default: return "";
    }
}

ExprRenderer::ExprRenderer(const ResolvedQuery& query, ParamRegistry& params, const CompileOptions& options)
    : query_(query), params_(params), options_(options) {}

std::string ExprRenderer::literal(const ParamValue& value, std::string type) {
    const bool vector = type == "vector";
    if (options_.inline_literals) return inline_text(value) + (vector ? "::VECTOR" : "");
    const auto k = params_.add(SqlParam{value, std::move(type), std::nullopt});
    return "$" + std::to_string(k) + (vector ? "::VECTOR" : "");
}

std::string ExprRenderer::runtime(const RuntimeParam& p) {
    if (options_.inline_literals) return "$" + p.name;
    SqlParam param{std::monostate{}, "runtime:" + p.name, p.name};
    if (auto it = options_.runtime_values.find(p.name); it != options_.runtime_values.end()) {
        param = typed_runtime_value(p.name, it->second);
    } else if (std::find(warnings_.begin(), warnings_.end(), "runtime parameter $" + p.name + " has no value") ==
               warnings_.end()) {
        warnings_.push_back("runtime parameter $" + p.name + " has no value");
    }
    return "$" + std::to_string(params_.add(std::move(param)));
}

const std::vector<double>& ExprRenderer::embedding(const std::string& text) {
    auto it = embedded_.find(text);
    if (it != embedded_.end()) return it->second;
    static const StubEmbedding fallback;
    const EmbeddingProvider& provider = options_.embedder ? *options_.embedder : fallback;
    try {
        return embedded_.emplace(text, provider.embed(text)).first->second;
    } catch (const EmbeddingError& e) {
        fail(std::string("embedding failed: ") + e.what());
    }
}

std::string ExprRenderer::expr(const Expr& e) {
    struct Visitor {
        ExprRenderer& self;
        std::string operator()(const ColumnRef& c) const {
            if (c.instance >= self.query_.instances.size()) fail("projection references an undeclared instance");
            const auto alias = self.query_.instances[c.instance].alias();
            return alias + "." + (c.star ? std::string("*") : quote_identifier(c.column));
        }
        std::string operator()(const Literal& l) const { return self.literal(to_param(l.value), type_of(l.value)); }
        std::string operator()(const EmbedText& t) const { return self.literal(self.embedding(t.text), "vector"); }
        std::string operator()(const RuntimeParam& p) const { return self.runtime(p); }
        std::string operator()(const BinaryExpr& b) const {
            return "(" + self.expr(*b.lhs) + " " + b.op + " " + self.expr(*b.rhs) + ")";
        }
    };
    return std::visit(Visitor{*this}, e.node);
}

std::string ExprRenderer::predicate(const Predicate& p) {
    if (p.rhs.empty()) fail("predicate without a right-hand side");
    const std::string lhs = expr(p.lhs);
    const std::string cmp{sql_comparator(p.cmp)};
    if (p.rhs.size() == 1) return lhs + " " + cmp + " " + expr(p.rhs[0]);

    const bool all_literals = std::all_of(p.rhs.begin(), p.rhs.end(), [](const Expr& e) { return e.as<Literal>(); });
    std::string out;
    if (p.cmp == Comparator::Eq && all_literals) {
        out = lhs + " IN (";
        for (std::size_t i = 0; i < p.rhs.size(); ++i) out += (i ? ", " : "") + expr(p.rhs[i]);
        return out + ")";
    }
    out = "(";
    for (std::size_t i = 0; i < p.rhs.size(); ++i) {
        if (i) out += " OR ";
        out += lhs + " " + cmp + " " + expr(p.rhs[i]);
    }
    return out + ")";
}

std::string ExprRenderer::projection(const Projection& p) {
    std::string e = expr(p.expr);
    if (!p.aggregate) return e;
    // A binary expression already carries its own parentheses.
    if (p.expr.as<BinaryExpr>()) e = e.substr(1, e.size() - 2);
    return std::string(sql_aggregate(*p.aggregate)) + "(" + e + ")";
}

std::string apply_meta(std::string sql, const ResolvedMeta& meta) {
    if (meta.lim) sql += " LIMIT " + std::to_string(*meta.lim);
    if (meta.off) sql += " OFFSET " + std::to_string(*meta.off);
    return sql;
}

SqlArtifact compile(const ResolvedQuery& query, const CompileOptions& options) {
    if (query.instances.empty()) fail("query has no table");
    if (query.projections.empty()) fail("query has an empty projection list");
    if (query.grouped()) {
        for (const auto& p : query.projections) {
            if (p.grouping == p.aggregate.has_value()) {
                fail("grouped query needs every projection to be a grouping key or an aggregate");
            }
        }
    }

    ParamRegistry params;
    ExprRenderer r(query, params, options);

    std::string sql = "SELECT ";
    for (std::size_t i = 0; i < query.projections.size(); ++i) {
        if (i) sql += ", ";
        sql += r.projection(query.projections[i]);
    }
    sql += " FROM ";
    for (std::size_t i = 0; i < query.instances.size(); ++i) {
        if (i) sql += ", ";
        sql += quote_identifier(query.instances[i].table) + " AS " + query.instances[i].alias();
    }
    if (!query.predicates.empty()) {
        sql += " WHERE ";
        for (std::size_t i = 0; i < query.predicates.size(); ++i) {
            if (i) sql += " AND ";
            sql += r.predicate(query.predicates[i]);
        }
    }
    std::string group;
    for (const auto& p : query.projections) {
        if (!p.grouping) continue;
        group += group.empty() ? " GROUP BY " : ", ";
        group += r.expr(p.expr);
    }
    sql += group;
    if (!query.order.empty()) {
        sql += " ORDER BY ";
        for (std::size_t i = 0; i < query.order.size(); ++i) {
            const auto& o = query.order[i];
            if (o.projection >= query.projections.size()) fail("ordering references a missing projection");
            if (i) sql += ", ";
            sql += r.projection(query.projections[o.projection]) + (o.descending ? " DESC" : " ASC");
        }
    }
    sql = apply_meta(std::move(sql), query.meta);

    SqlArtifact out{std::move(sql), std::move(params).take(), r.warnings()};
    return out;
}

}  // namespace memax
