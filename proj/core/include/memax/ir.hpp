#pragma once

// Coordinate-indexed Memelang IR: matrices of vectors of limits.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "memax/axial.hpp"
#include "memax/error.hpp"
#include "memax/lexer.hpp"

namespace memax {

using axial::Coordinate;

/// Memelang grid arity: Axis:2 matrix, Axis:1 vector, Axis:0 limit.
inline constexpr std::size_t kArity = 3;

enum class Comparator { Eq, Ne, Gt, Ge, Lt, Le, Match, NotMatch };

std::string_view comparator_lexeme(Comparator cmp) noexcept;
std::optional<Comparator> parse_comparator(std::string_view lexeme) noexcept;

/// Axis:0 index after right alignment.
enum class Slot : std::size_t { Value = 0, Column = 1, Table = 2 };

std::string_view slot_role(Slot slot) noexcept;

struct Atom {
    TokenKind kind = TokenKind::Wildcard;
    /// Alnum/number/EMB: lexeme; QUOT: decoded text; VAR: name without '$'.
    std::string text = "_";
    Span span;

    bool is(TokenKind k) const noexcept { return kind == k; }

    friend bool operator==(const Atom& a, const Atom& b) { return a.kind == b.kind && a.text == b.text; }
};

struct Term {
    enum class Shape { Atom, ModAtom, Binary };

    Shape shape = Shape::Atom;
    std::string mod;          // empty for Shape::Atom
    std::vector<Atom> atoms;  // one atom, or lhs/rhs for Binary

    const Atom& first() const { return atoms.front(); }
    const Atom& last() const { return atoms.back(); }
    bool is_wildcard() const { return shape == Shape::Atom && atoms.front().is(TokenKind::Wildcard); }

    static Term atom(Atom a) { return Term{Shape::Atom, {}, {std::move(a)}}; }

    friend bool operator==(const Term&, const Term&) = default;
};

enum class FuncTag { Grp, Asc, Des, Sum, Cnt, Min, Max, Avg, Last };

std::string_view func_name(FuncTag tag) noexcept;
std::optional<FuncTag> parse_func(std::string_view name) noexcept;
bool is_aggregate(FuncTag tag) noexcept;

struct Binding {
    std::string name;
    friend bool operator==(const Binding&, const Binding&) = default;
};

using Func = std::variant<FuncTag, Binding>;

/// One Axis:0 cell: [left-term] [:tag]* [cmp] right-term (, right-term)*
struct Limit {
    Coordinate coord;  // effective (right-aligned) coordinate
    std::optional<Term> left;
    std::vector<Func> funcs;
    Comparator cmp = Comparator::Eq;
    std::vector<Term> right;
    Span span;
    std::string text;  // source text of the cell

    std::size_t axis0() const { return coord[0]; }
    Slot slot() const { return static_cast<Slot>(coord[0]); }

    /// Single-atom content of a table/column slot.
    const Atom& slot_atom() const { return right.front().first(); }

    friend bool operator==(const Limit& a, const Limit& b) {
        return a.coord == b.coord && a.left == b.left && a.funcs == b.funcs && a.cmp == b.cmp && a.right == b.right;
    }
};

struct VectorIR {
    std::size_t matrix = 0;
    std::size_t index = 0;      // Axis:1
    std::vector<Limit> limits;  // descending axis0: table, column, value
    Span span;

    std::size_t width() const noexcept { return limits.size(); }
    const Limit* slot(Slot s) const {
        for (const auto& l : limits) {
            if (l.slot() == s) return &l;
        }
        return nullptr;
    }

    friend bool operator==(const VectorIR& a, const VectorIR& b) {
        return a.matrix == b.matrix && a.index == b.index && a.limits == b.limits;
    }
};

struct MetaDirectives {
    std::optional<std::int64_t> lim;
    std::optional<std::int64_t> off;
    std::optional<Atom> sim;  // INT, DEC or VAR

    bool empty() const noexcept { return !lim && !off && !sim; }
    friend bool operator==(const MetaDirectives&, const MetaDirectives&) = default;
};

struct MetaVector {
    std::size_t index = 0;  // Axis:1 position within its matrix
    std::vector<std::pair<std::string, Atom>> entries;
    Span span;

    friend bool operator==(const MetaVector& a, const MetaVector& b) {
        return a.index == b.index && a.entries == b.entries;
    }
};

struct MatrixIR {
    std::size_t index = 0;  // Axis:2
    std::vector<VectorIR> vectors;
    std::vector<MetaVector> meta;
    MetaDirectives directives;
    Span span;

    friend bool operator==(const MatrixIR& a, const MatrixIR& b) {
        return a.index == b.index && a.vectors == b.vectors && a.meta == b.meta && a.directives == b.directives;
    }
};

using Query = std::vector<MatrixIR>;

}  // namespace memax
