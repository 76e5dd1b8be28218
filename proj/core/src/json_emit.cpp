#include "memax/json_emit.hpp"

#include <json.hpp>

#include "memax/sql.hpp"

namespace memax {

namespace {

using Json = nlohmann::ordered_json;

Json coord_json(const Coordinate& c) { return Json(c.high_to_low()); }

Json atom_json(const Atom& a) { return Json{{"kind", kind_name(a.kind)}, {"text", a.text}}; }

Json term_json(const Term& t) {
    Json out;
    switch (t.shape) {
        case Term::Shape::Atom: out["shape"] = "atom"; break;
        case Term::Shape::ModAtom: out["shape"] = "mod_atom"; break;
        case Term::Shape::Binary: out["shape"] = "binary"; break;
    }
    if (!t.mod.empty()) out["mod"] = t.mod;
    out["atoms"] = Json::array();
    for (const auto& a : t.atoms) out["atoms"].push_back(atom_json(a));
    return out;
}

Json limit_json(const Limit& l) {
    Json out;
    out["axis0"] = l.axis0();
    out["coord"] = coord_json(l.coord);
    out["role"] = slot_role(l.slot());
    out["left"] = l.left ? term_json(*l.left) : Json(nullptr);
    out["funcs"] = Json::array();
    for (const auto& f : l.funcs) {
        if (const auto* tag = std::get_if<FuncTag>(&f)) {
            out["funcs"].push_back(func_name(*tag));
        } else {
            out["funcs"].push_back("$" + std::get<Binding>(f).name);
        }
    }
    out["cmp"] = comparator_lexeme(l.cmp);
    out["right"] = Json::array();
    for (const auto& t : l.right) out["right"].push_back(term_json(t));
    return out;
}

Json meta_json(const MetaDirectives& d) {
    Json out = Json::object();
    if (d.lim) out["lim"] = *d.lim;
    if (d.off) out["off"] = *d.off;
    if (d.sim) out["sim"] = atom_json(*d.sim);
    return out;
}

Json value_json(const LiteralValue& v) {
    struct Visitor {
        Json operator()(const std::string& s) const { return s; }
        Json operator()(std::int64_t i) const { return i; }
        Json operator()(const Decimal& d) const { return Json::parse(d.text); }
        Json operator()(const std::vector<double>& v) const { return v; }
    };
    return std::visit(Visitor{}, v);
}

Json expr_json(const Expr& e, const ResolvedQuery& q) {
    struct Visitor {
        const ResolvedQuery& q;
        Json operator()(const ColumnRef& c) const {
            return Json{{"column", {{"alias", q.instances.at(c.instance).alias()}, {"name", c.star ? "*" : c.column}}}};
        }
        Json operator()(const Literal& l) const {
            static constexpr const char* kTypes[] = {"text", "integer", "decimal", "vector"};
            return Json{{"literal", {{"type", kTypes[l.value.index()]}, {"value", value_json(l.value)}}}};
        }
        Json operator()(const EmbedText& t) const { return Json{{"embed", t.text}}; }
        Json operator()(const RuntimeParam& p) const { return Json{{"runtime", p.name}}; }
        Json operator()(const BinaryExpr& b) const {
            return Json{{"op", b.op}, {"lhs", expr_json(*b.lhs, q)}, {"rhs", expr_json(*b.rhs, q)}};
        }
    };
    return std::visit(Visitor{q}, e.node);
}

Json param_value_json(const ParamValue& v) {
    struct Visitor {
        Json operator()(std::monostate) const { return nullptr; }
        Json operator()(const std::string& s) const { return s; }
        Json operator()(std::int64_t i) const { return i; }
        Json operator()(const Decimal& d) const { return Json::parse(d.text); }
        Json operator()(const std::vector<double>& v) const { return v; }
    };
    return std::visit(Visitor{}, v);
}

}  // namespace

std::string ast_json(const Query& query) {
    Json matrices = Json::array();
    for (const auto& m : query) {
        Json vectors = Json::array();
        for (const auto& v : m.vectors) {
            Json limits = Json::array();
            for (const auto& l : v.limits) limits.push_back(limit_json(l));
            vectors.push_back(Json{{"coord", {v.matrix, v.index}}, {"limits", std::move(limits)}});
        }
        matrices.push_back(Json{{"index", m.index}, {"vectors", std::move(vectors)}, {"meta", meta_json(m.directives)}});
    }
    return Json{{"matrices", std::move(matrices)}}.dump();
}

std::string resolved_json(const std::vector<ResolvedQuery>& statements) {
    Json out = Json::array();
    for (const auto& q : statements) {
        Json s;
        s["instances"] = Json::array();
        for (const auto& i : q.instances) {
            s["instances"].push_back(
                Json{{"table", i.table}, {"alias", i.alias()}, {"introduced_at", coord_json(i.introduced_at)}});
        }
        s["projections"] = Json::array();
        for (const auto& p : q.projections) {
            s["projections"].push_back(Json{{"expr", expr_json(p.expr, q)},
                                            {"aggregate", p.aggregate ? Json(func_name(*p.aggregate)) : Json(nullptr)},
                                            {"grouping", p.grouping}});
        }
        s["predicates"] = Json::array();
        for (const auto& p : q.predicates) {
            Json rhs = Json::array();
            for (const auto& e : p.rhs) rhs.push_back(expr_json(e, q));
            s["predicates"].push_back(
                Json{{"lhs", expr_json(p.lhs, q)}, {"cmp", comparator_lexeme(p.cmp)}, {"rhs", std::move(rhs)}});
        }
        s["order"] = Json::array();
        for (const auto& o : q.order) {
            s["order"].push_back(Json{{"projection", o.projection}, {"direction", o.descending ? "des" : "asc"}});
        }
        Json meta = Json::object();
        if (q.meta.lim) meta["lim"] = *q.meta.lim;
        if (q.meta.off) meta["off"] = *q.meta.off;
        if (q.meta.sim) meta["sim"] = expr_json(*q.meta.sim, q);
        s["meta"] = std::move(meta);
        s["params"] = q.params;
        out.push_back(std::move(s));
    }
    return Json{{"statements", std::move(out)}}.dump();
}

std::string params_json(const SqlArtifact& artifact) {
    Json params = Json::array();
    Json types = Json::array();
    for (const auto& p : artifact.params) {
        params.push_back(param_value_json(p.value));
        types.push_back(p.type);
    }
    return Json{{"params", std::move(params)}, {"types", std::move(types)}}.dump();
}

}  // namespace memax
