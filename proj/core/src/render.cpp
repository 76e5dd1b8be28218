#include <map>

#include "memax/parser.hpp"

namespace memax {

std::string render(const Atom& atom) {
    switch (atom.kind) {
        case TokenKind::Quot: return quote(atom.text);
        case TokenKind::Var: return "$" + atom.text;
        default: return atom.text;
    }
}

std::string render(const Term& term) {
    switch (term.shape) {
        case Term::Shape::Atom: return render(term.first());
        case Term::Shape::ModAtom: return term.mod + render(term.first());
        case Term::Shape::Binary: return render(term.first()) + term.mod + render(term.last());
    }
    return {};
}

std::string render(const Limit& limit) {
    std::string out;
    if (limit.left) out += render(*limit.left);
    for (const auto& f : limit.funcs) {
        out += ':';
        if (const auto* tag = std::get_if<FuncTag>(&f)) {
            out += func_name(*tag);
        } else {
            out += '$' + std::get<Binding>(f).name;
        }
    }

    const bool eq = limit.cmp == Comparator::Eq;
    const bool wildcard_only = limit.right.size() == 1 && limit.right[0].is_wildcard();
    const bool left_is_mod = limit.left && limit.left->shape == Term::Shape::ModAtom;
    // Implicit "=_" after tags or a bare modified term.
    if (eq && wildcard_only && (!limit.funcs.empty() || left_is_mod)) return out;

    // A lone modified term without a comparator would re-parse as a left term.
    const bool right_is_mod = limit.right.size() == 1 && limit.right[0].shape == Term::Shape::ModAtom;
    const bool bare = !limit.left && limit.funcs.empty();
    if (!(eq && bare && !right_is_mod)) out += comparator_lexeme(limit.cmp);

    for (std::size_t i = 0; i < limit.right.size(); ++i) {
        if (i) out += ',';
        out += render(limit.right[i]);
    }
    return out;
}

std::string render(const VectorIR& vector) {
    std::string out;
    for (const auto& l : vector.limits) {
        if (!out.empty()) out += ' ';
        out += render(l);
    }
    return out;
}

namespace {

std::string render_meta(const MetaVector& meta) {
    std::string out = "%m";
    for (const auto& [key, value] : meta.entries) out += ' ' + key + ' ' + render(value);
    return out;
}

}  // namespace

std::string render(const MatrixIR& matrix) {
    std::map<std::size_t, std::string> parts;
    for (const auto& v : matrix.vectors) parts[v.index] = render(v);
    for (const auto& m : matrix.meta) parts[m.index] = render_meta(m);
    std::string out;
    for (const auto& [index, text] : parts) {
        if (!out.empty()) out += ';';
        out += text;
    }
    return out + ";;";
}

std::string render(const Query& query) {
    std::string out;
    for (const auto& m : query) {
        if (!out.empty()) out += ' ';
        out += render(m);
    }
    return out;
}

std::string format_coordinates(const Query& query) {
    std::string out;
    const auto line = [&](const Coordinate& x, std::string_view role, std::string_view text) {
        out += x.str();
        out += '\t';
        out += role;
        out += '\t';
        out += text;
        out += '\n';
    };
    for (const auto& matrix : query) {
        std::map<Coordinate, const Limit*> tables;
        for (const auto& vector : matrix.vectors) {
            if (!vector.slot(Slot::Table)) {
                const auto at = Coordinate::from_high({vector.matrix, vector.index, 2});
                if (axial::carry_forward(tables, 1, at)) line(at, "Table (carried)", "(@)");
            }
            for (const auto& limit : vector.limits) {
                if (limit.slot() == Slot::Table) tables.emplace(limit.coord, &limit);
                line(limit.coord, slot_role(limit.slot()), limit.text.empty() ? render(limit) : limit.text);
            }
        }
    }
    return out;
}

}  // namespace memax
