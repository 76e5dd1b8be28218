#include "memax/resolver.hpp"

#include <algorithm>
#include <charconv>
#include <map>

#include "memax/parser.hpp"

namespace memax {

bool is_vector_op(std::string_view op) noexcept { return op == "<->" || op == "<#>" || op == "<=>"; }

bool ResolvedQuery::grouped() const noexcept {
    for (const auto& p : projections) {
        if (p.grouping || p.aggregate) return true;
    }
    return false;
}

namespace {

[[noreturn]] void fail(const std::string& message, Span span, Stage stage = Stage::Resolve) {
    throw Error(stage, message, span);
}

Expr make(ColumnRef c) { return Expr{std::move(c)}; }
Expr make(Literal l) { return Expr{std::move(l)}; }

Expr binary(std::string op, Expr lhs, Expr rhs) {
    return Expr{BinaryExpr{std::move(op), std::make_shared<const Expr>(std::move(lhs)),
                           std::make_shared<const Expr>(std::move(rhs))}};
}

// "@" looks one vector back along Axis:1, inheriting across meta vectors.
const axial::Offset kVectorSame = axial::Offset::from_high({0, -1, 0});

Coordinate at_slot(const VectorIR& v, Slot s) {
    return Coordinate::from_high({v.matrix, v.index, static_cast<std::size_t>(s)});
}

Literal integer_literal(const Atom& a) {
    std::string_view s = a.text;
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) fail("integer literal out of range: " + a.text, a.span);
    return Literal{v};
}

class MatrixResolver {
public:
    template <class Summary>
    MatrixResolver(const MatrixIR& matrix, const ResolveOptions& options, const Summary* previous)
        : matrix_(matrix), options_(options) {
        if (previous) {
            prev_table_ = previous->table;
            prev_column_ = previous->column;
            prev_literal_ = previous->literal;
            has_previous_ = true;
        }
    }

    ResolvedQuery run() {
        resolve_meta();
        for (const auto& vector : matrix_.vectors) resolve_vector(vector);
        return complete_grouping(std::move(out_));
    }

    const VectorResolution* last() const { return last_; }

private:
    void resolve_meta() {
        const auto& d = matrix_.directives;
        out_.meta.lim = d.lim;
        out_.meta.off = d.off;
        if (d.sim) {
            const auto& a = *d.sim;
            if (a.is(TokenKind::Int)) {
                out_.meta.sim = make(integer_literal(a));
            } else if (a.is(TokenKind::Dec)) {
                out_.meta.sim = make(Literal{Decimal{a.text}});
            } else {
                out_.meta.sim = runtime(a);
            }
        }
    }

    Expr runtime(const Atom& var) {
        if (!options_.runtime_params.contains(var.text)) fail("unbound variable $" + var.text, var.span);
        if (std::find(out_.params.begin(), out_.params.end(), var.text) == out_.params.end()) {
            out_.params.push_back(var.text);
        }
        return Expr{RuntimeParam{var.text}};
    }

    std::size_t introduce(const std::string& table, const Coordinate& at) {
        out_.instances.push_back(TableInstance{table, out_.instances.size(), at});
        return out_.instances.size() - 1;
    }

    std::size_t resolve_table(const VectorIR& v) {
        const auto at = at_slot(v, Slot::Table);
        const std::size_t* carried = axial::carry_forward(tables_, 1, at);
        const Limit* slot = v.slot(Slot::Table);
        if (!slot) {
            if (!carried) fail("no table in scope for vector", v.span);
            return *carried;
        }
        const Atom& a = slot->slot_atom();
        const auto named = [&](const std::string& name) {
            if (carried && out_.instances[*carried].table == name) return *carried;
            return introduce(name, at);
        };
        switch (a.kind) {
            case TokenKind::Alnum: return named(a.text);
            case TokenKind::VectorSame: {
                const std::size_t* prior = prior_of(tables_, at, a);
                return introduce(out_.instances[*prior].table, at);
            }
            case TokenKind::MatrixSame:
                if (!has_previous_) fail("^ without a prior matrix", a.span);
                return named(prev_table_);
            default:
                fail("non-fixed table slot '" + render(a) + "' is not supported by SQL backends", a.span);
        }
    }

    ColumnRef resolve_column(const VectorIR& v, std::size_t instance) {
        const auto at = at_slot(v, Slot::Column);
        const Limit* slot = v.slot(Slot::Column);
        ColumnRef col{instance, {}, false};
        if (!slot) {
            const Limit* value = v.slot(Slot::Value);
            if (!(value->right.size() == 1 && value->right[0].is_wildcard() && value->cmp == Comparator::Eq &&
                  !value->left && value->funcs.empty())) {
                fail("a value-only vector must be a lone wildcard", value->span);
            }
            col.star = true;
            return col;
        }
        const Atom& a = slot->slot_atom();
        switch (a.kind) {
            case TokenKind::Alnum: col.column = a.text; break;
            case TokenKind::Wildcard: col.star = true; break;
            case TokenKind::VectorSame: {
                const ColumnRef* prior = prior_of(columns_, at, a);
                col.column = prior->column;
                col.star = prior->star;
                break;
            }
            case TokenKind::MatrixSame:
                if (!has_previous_) fail("^ without a prior matrix", a.span);
                col.column = prev_column_.column;
                col.star = prev_column_.star;
                break;
            default: fail("non-fixed column slot '" + render(a) + "' is not supported by SQL backends", a.span);
        }
        return col;
    }

    template <class Map>
    const typename Map::mapped_type* prior_of(const Map& e, const Coordinate& at, const Atom& ref) {
        try {
            if (const auto* found = axial::resolve_relative(e, at, kVectorSame, 1)) return found;
        } catch (const axial::DanglingReference&) {
        }
        fail("@ has no prior vector to refer to", ref.span);
    }

    Expr operand(const Atom& a, const Coordinate& at, bool vector_context) {
        switch (a.kind) {
            case TokenKind::Alnum:
            case TokenKind::Quot:
                if (vector_context) return Expr{EmbedText{a.text}};
                return make(Literal{a.text});
            case TokenKind::Int:
                if (vector_context) fail("vector operator needs a text or vector operand", a.span);
                return make(integer_literal(a));
            case TokenKind::Dec:
                if (vector_context) fail("vector operator needs a text or vector operand", a.span);
                return make(Literal{Decimal{a.text}});
            case TokenKind::Emb: return make(Literal{parse_embedding(a.text)});
            case TokenKind::VectorSame: {
                const auto* prior = prior_of(values_, Coordinate::from_high({at[2], at[1], 0}), a);
                return resolve_value_same(prior, a.span);
            }
            case TokenKind::MatrixSame:
                if (!has_previous_) fail("^ without a prior matrix", a.span);
                if (!prev_literal_) {
                    fail("^ refers to a non-literal value of the prior matrix; statements compile separately",
                         a.span, Stage::Compile);
                }
                return make(*prev_literal_);
            case TokenKind::Var: {
                if (auto bound = env_.lookup(a.text)) return values_.at(*bound).value;
                if (a.text == "sim" && out_.meta.sim) return *out_.meta.sim;
                return runtime(a);
            }
            case TokenKind::Wildcard: fail("wildcard cannot be compared", a.span);
            default: fail("unexpected atom '" + a.text + "'", a.span);
        }
    }

    Expr term(const Term& t, const Coordinate& at) {
        switch (t.shape) {
            case Term::Shape::Atom: return operand(t.first(), at, false);
            case Term::Shape::Binary: {
                const bool vec = is_vector_op(t.mod);
                return binary(t.mod, operand(t.first(), at, false), operand(t.last(), at, vec));
            }
            case Term::Shape::ModAtom: fail("modifier '" + t.mod + "' has no left operand", t.first().span);
        }
        fail("malformed term", {});
    }

    void resolve_vector(const VectorIR& v) {
        const std::size_t instance = resolve_table(v);
        tables_[at_slot(v, Slot::Table)] = instance;
        const ColumnRef column = resolve_column(v, instance);
        columns_[at_slot(v, Slot::Column)] = column;

        const Limit& value = *v.slot(Slot::Value);
        const Coordinate at = value.coord;
        const bool trivial = value.right.size() == 1 && value.right[0].is_wildcard() && value.cmp == Comparator::Eq;
        if (column.star && (!trivial || value.left || !value.funcs.empty())) {
            fail("a value predicate over all columns is not supported by SQL backends", value.span);
        }

        Expr expr = make(column);
        if (value.left) {
            const Term& left = *value.left;
            if (left.shape == Term::Shape::ModAtom) {
                expr = binary(left.mod, std::move(expr), operand(left.first(), at, is_vector_op(left.mod)));
            } else if (!left.is_wildcard()) {
                fail("unsupported left-hand term '" + render(left) + "'", value.span);
            }
        }

        Projection proj{expr, std::nullopt, false, at};
        std::optional<bool> descending;
        std::vector<std::string> bindings;
        for (const auto& f : value.funcs) {
            if (const auto* b = std::get_if<Binding>(&f)) {
                bindings.push_back(b->name);
                continue;
            }
            const FuncTag tag = std::get<FuncTag>(f);
            if (tag == FuncTag::Grp) {
                proj.grouping = true;
            } else if (tag == FuncTag::Asc || tag == FuncTag::Des) {
                if (descending) fail("more than one ordering tag", value.span);
                descending = tag == FuncTag::Des;
            } else {
                if (proj.aggregate) fail("more than one aggregate tag", value.span);
                proj.aggregate = tag;
            }
        }
        if (proj.grouping && proj.aggregate) fail("projection tagged both :grp and an aggregate", value.span);

        std::optional<Literal> literal;
        if (!trivial) {
            Predicate pred{expr, value.cmp, {}, at};
            for (const auto& t : value.right) pred.rhs.push_back(term(t, at));
            if (value.cmp == Comparator::Eq && pred.rhs.size() == 1) {
                if (const auto* lit = pred.rhs[0].as<Literal>()) literal = *lit;
            }
            out_.predicates.push_back(std::move(pred));
        }

        values_[at] = VectorResolution{instance, column, expr, literal, at};
        for (auto& name : bindings) env_ = env_.bind(std::move(name), at);
        last_ = &values_[at];

        out_.projections.push_back(std::move(proj));
        if (descending) out_.order.push_back(OrderSpec{out_.projections.size() - 1, *descending});
    }

    const MatrixIR& matrix_;
    const ResolveOptions& options_;
    bool has_previous_ = false;
    std::string prev_table_;
    ColumnRef prev_column_;
    std::optional<Literal> prev_literal_;

    std::map<Coordinate, std::size_t> tables_;
    std::map<Coordinate, ColumnRef> columns_;
    std::map<Coordinate, VectorResolution> values_;
    axial::Environment env_;
    const VectorResolution* last_ = nullptr;
    ResolvedQuery out_;
};

}  // namespace

Expr resolve_value_same(const VectorResolution* prior, Span at) {
    if (!prior) fail("@ has no prior vector to refer to", at);
    return prior->value;
}

ResolvedQuery complete_grouping(ResolvedQuery query) {
    if (!query.grouped()) return query;
    for (auto& p : query.projections) {
        if (p.grouping && p.aggregate) fail("projection tagged both :grp and an aggregate", {});
        if (const auto* col = p.expr.as<ColumnRef>(); col && col->star) {
            fail("all-column projection cannot appear in a grouped query", {});
        }
        if (!p.grouping && !p.aggregate) p.aggregate = FuncTag::Last;
    }
    return query;
}

Resolver::Resolver(ResolveOptions options) : options_(std::move(options)) {}

ResolvedQuery Resolver::resolve(const MatrixIR& matrix) {
    MatrixResolver r(matrix, options_, previous_ ? &*previous_ : static_cast<const MatrixSummary*>(nullptr));
    auto out = r.run();
    if (const auto* last = r.last()) {
        previous_ = MatrixSummary{out.instances[last->instance].table, last->column, last->literal};
    }
    return out;
}

std::vector<ResolvedQuery> resolve(const Query& query, const ResolveOptions& options) {
    Resolver resolver(options);
    std::vector<ResolvedQuery> out;
    out.reserve(query.size());
    for (const auto& m : query) out.push_back(resolver.resolve(m));
    return out;
}

}  // namespace memax
