#pragma once

// Generic axial-grammar engine.
//
// A token stream over ranked separators and opaque atoms is scanned into an
// n-dimensional grid of cells. Each separator of rank r advances the scan
// state (components above r kept, component r incremented, components below
// r reset); each atom lands in the cell named by the current state.

#include <algorithm>
#include <cassert>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace memax::axial {

using Rank = std::size_t;

class MalformedStream : public std::invalid_argument {
public:
    MalformedStream(std::size_t position, const std::string& message)
        : std::invalid_argument(message), position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class DanglingReference : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Point of the lattice N^n. Components are addressed by rank; ordering and
/// printing run from the highest rank down, i.e. (i_{n-1}, ..., i_0).
class Coordinate {
public:
    Coordinate() = default;
    explicit Coordinate(std::size_t arity) : by_rank_(arity, 0) {}

    /// Components listed from the highest rank down.
    static Coordinate from_high(std::initializer_list<std::size_t> high_to_low) {
        return from_high(std::span<const std::size_t>(high_to_low.begin(), high_to_low.size()));
    }
    static Coordinate from_high(std::span<const std::size_t> high_to_low) {
        Coordinate c(high_to_low.size());
        for (std::size_t i = 0; i < high_to_low.size(); ++i) {
            c.by_rank_[high_to_low.size() - 1 - i] = high_to_low[i];
        }
        return c;
    }

    std::size_t arity() const noexcept { return by_rank_.size(); }

    std::size_t operator[](Rank r) const {
        assert(r < by_rank_.size());
        return by_rank_[r];
    }
    std::size_t& operator[](Rank r) {
        assert(r < by_rank_.size());
        return by_rank_[r];
    }

    /// Components strictly above rank r, highest first.
    std::vector<std::size_t> prefix_above(Rank r) const {
        std::vector<std::size_t> out;
        for (std::size_t m = by_rank_.size(); m-- > r + 1;) out.push_back(by_rank_[m]);
        return out;
    }

    /// Components from the highest rank down.
    std::vector<std::size_t> high_to_low() const { return {by_rank_.rbegin(), by_rank_.rend()}; }

    std::string str() const {
        std::string out = "(";
        for (std::size_t m = by_rank_.size(); m-- > 0;) {
            out += std::to_string(by_rank_[m]);
            if (m != 0) out += ',';
        }
        out += ')';
        return out;
    }

    friend bool operator==(const Coordinate&, const Coordinate&) = default;
    friend std::strong_ordering operator<=>(const Coordinate& a, const Coordinate& b) {
        if (auto c = a.arity() <=> b.arity(); c != 0) return c;
        for (std::size_t m = a.arity(); m-- > 0;) {
            if (auto c = a.by_rank_[m] <=> b.by_rank_[m]; c != 0) return c;
        }
        return std::strong_ordering::equal;
    }

private:
    std::vector<std::size_t> by_rank_;
};

/// Scan-state update for a separator of rank r.
inline Coordinate advance(Coordinate state, Rank r) {
    assert(r < state.arity());
    state[r] += 1;
    for (Rank m = 0; m < r; ++m) state[m] = 0;
    return state;
}

struct Separator {
    Rank rank = 0;
    friend bool operator==(const Separator&, const Separator&) = default;
};

template <class Atom>
using RankedToken = std::variant<Atom, Separator>;

template <class Atom>
struct Cell {
    /// Stream position of the first atom placed here; orders cells by first occurrence.
    std::size_t first_seen = 0;
    std::vector<Atom> atoms;

    friend bool operator==(const Cell&, const Cell&) = default;
};

/// Partial map from coordinates to non-empty atom lists. Empty cells are absent.
template <class Atom>
class CellGrid {
public:
    using CellMap = std::map<Coordinate, Cell<Atom>>;

    explicit CellGrid(std::size_t arity = 1) : arity_(arity) {}

    std::size_t arity() const noexcept { return arity_; }
    bool empty() const noexcept { return cells_.empty(); }
    std::size_t size() const noexcept { return cells_.size(); }

    const CellMap& cells() const noexcept { return cells_; }
    auto begin() const { return cells_.begin(); }
    auto end() const { return cells_.end(); }

    const std::vector<Atom>* find(const Coordinate& x) const {
        auto it = cells_.find(x);
        return it == cells_.end() ? nullptr : &it->second.atoms;
    }

    void append(const Coordinate& x, Atom atom, std::size_t position) {
        assert(x.arity() == arity_);
        auto [it, inserted] = cells_.try_emplace(x);
        if (inserted) it->second.first_seen = position;
        it->second.atoms.push_back(std::move(atom));
    }

    void insert_cell(const Coordinate& x, Cell<Atom> cell) { cells_.insert_or_assign(x, std::move(cell)); }

    /// Occupied coordinates ordered by first occurrence.
    std::vector<Coordinate> first_occurrence() const {
        std::vector<std::pair<std::size_t, Coordinate>> keyed;
        keyed.reserve(cells_.size());
        for (const auto& [x, cell] : cells_) keyed.emplace_back(cell.first_seen, x);
        std::sort(keyed.begin(), keyed.end());
        std::vector<Coordinate> out;
        out.reserve(keyed.size());
        for (auto& [pos, x] : keyed) out.push_back(std::move(x));
        return out;
    }

    /// x precedes y in first-occurrence order; both must be occupied.
    bool precedes(const Coordinate& x, const Coordinate& y) const {
        return cells_.at(x).first_seen < cells_.at(y).first_seen;
    }

    friend bool operator==(const CellGrid&, const CellGrid&) = default;

private:
    std::size_t arity_;
    CellMap cells_;
};

/// Single-consumer streaming scanner. After any prefix of the stream, grid()
/// equals scan() of that prefix.
template <class Atom>
class Scanner {
public:
    explicit Scanner(std::size_t arity) : state_(check_arity(arity)), grid_(arity) {}

    void feed(const RankedToken<Atom>& token) {
        if (const auto* sep = std::get_if<Separator>(&token)) {
            feed_separator(sep->rank);
        } else {
            feed_atom(std::get<Atom>(token));
        }
    }

    void feed_separator(Rank rank) {
        if (rank >= state_.arity()) {
            throw MalformedStream(position_, "separator rank " + std::to_string(rank) +
                                                 " outside arity " + std::to_string(state_.arity()));
        }
        state_ = advance(std::move(state_), rank);
        ++position_;
    }

    void feed_atom(Atom atom) {
        grid_.append(state_, std::move(atom), position_);
        ++position_;
    }

    const Coordinate& state() const noexcept { return state_; }
    const CellGrid<Atom>& grid() const noexcept { return grid_; }
    std::size_t position() const noexcept { return position_; }

private:
    static std::size_t check_arity(std::size_t arity) {
        if (arity == 0) throw std::invalid_argument("axial arity must be positive");
        return arity;
    }

    Coordinate state_;
    CellGrid<Atom> grid_;
    std::size_t position_ = 0;
};

template <class Atom>
CellGrid<Atom> scan(std::span<const RankedToken<Atom>> tokens, std::size_t arity) {
    Scanner<Atom> scanner(arity);
    for (const auto& token : tokens) scanner.feed(token);
    return scanner.grid();
}

template <class Atom>
CellGrid<Atom> scan(const std::vector<RankedToken<Atom>>& tokens, std::size_t arity) {
    return scan(std::span<const RankedToken<Atom>>(tokens), arity);
}

/// Bijective reindexing of the lattice: identity or slice-local reversal
/// along one rank. Reversal is an involution, so inverse() == forward().
class ReindexMap {
public:
    using Prefix = std::vector<std::size_t>;

    static ReindexMap identity() { return ReindexMap(); }

    static ReindexMap reversal(Rank rank, std::map<Prefix, std::size_t> widths) {
        ReindexMap m;
        m.rank_ = rank;
        m.widths_ = std::move(widths);
        return m;
    }

    bool is_identity() const noexcept { return !rank_.has_value(); }
    std::optional<Rank> rank() const noexcept { return rank_; }

    /// Slice width W_r(u): one past the largest occupied index, 0 for an empty slice.
    std::size_t width(const Prefix& prefix) const {
        auto it = widths_.find(prefix);
        return it == widths_.end() ? 0 : it->second;
    }

    Coordinate forward(Coordinate x) const {
        if (!rank_) return x;
        const Rank r = *rank_;
        const std::size_t w = width(x.prefix_above(r));
        if (x[r] < w) x[r] = w - 1 - x[r];
        return x;
    }

    Coordinate inverse(const Coordinate& x) const { return forward(x); }

private:
    std::optional<Rank> rank_;
    std::map<Prefix, std::size_t> widths_;
};

template <class Atom>
ReindexMap reverse_reindex(const CellGrid<Atom>& grid, Rank rank) {
    std::map<ReindexMap::Prefix, std::size_t> widths;
    for (const auto& [x, cell] : grid) {
        auto& w = widths[x.prefix_above(rank)];
        w = std::max(w, x[rank] + 1);
    }
    return ReindexMap::reversal(rank, std::move(widths));
}

/// Effective grid C^pi(x) = C(pi^-1(x)); first-occurrence positions carry over.
template <class Atom>
CellGrid<Atom> reindex(const CellGrid<Atom>& grid, const ReindexMap& map) {
    CellGrid<Atom> out(grid.arity());
    for (const auto& [x, cell] : grid) out.insert_cell(map.forward(x), cell);
    return out;
}

/// Carry-forward completion along rank r: the value at x if defined,
/// otherwise the nearest defined value below x along e_r, otherwise null.
template <class Map>
const typename Map::mapped_type* carry_forward(const Map& e, Rank r, Coordinate x) {
    for (;;) {
        if (auto it = e.find(x); it != e.end()) return &it->second;
        if (x[r] == 0) return nullptr;
        --x[r];
    }
}

/// Integer offset vector, addressed by rank like Coordinate.
class Offset {
public:
    Offset() = default;
    explicit Offset(std::size_t arity) : by_rank_(arity, 0) {}

    static Offset from_high(std::initializer_list<std::ptrdiff_t> high_to_low) {
        Offset o(high_to_low.size());
        std::size_t i = high_to_low.size();
        for (auto v : high_to_low) o.by_rank_[--i] = v;
        return o;
    }

    std::size_t arity() const noexcept { return by_rank_.size(); }
    std::ptrdiff_t operator[](Rank r) const { return by_rank_[r]; }

    /// x + offset, or nullopt if a component would go negative.
    std::optional<Coordinate> apply(Coordinate x) const {
        assert(x.arity() == by_rank_.size());
        for (Rank r = 0; r < by_rank_.size(); ++r) {
            const auto shifted = static_cast<std::ptrdiff_t>(x[r]) + by_rank_[r];
            if (shifted < 0) return std::nullopt;
            x[r] = static_cast<std::size_t>(shifted);
        }
        return x;
    }

private:
    std::vector<std::ptrdiff_t> by_rank_;
};

/// Resolves a reference atom with offset `delta` placed at `at`.
/// Returns null when the target is absent after inheritance; throws when
/// the offset leaves the lattice.
template <class Map>
const typename Map::mapped_type* resolve_relative(const Map& e, const Coordinate& at,
                                                  const Offset& delta, Rank inherit_rank) {
    auto target = delta.apply(at);
    if (!target) throw DanglingReference("reference from " + at.str() + " leaves the lattice");
    return carry_forward(e, inherit_rank, *target);
}

/// Single-pass binding environment: variable name to coordinate. A later
/// binding of the same name shadows the earlier one.
class Environment {
public:
    Environment bind(std::string name, Coordinate at) const {
        Environment next = *this;
        next.bindings_.insert_or_assign(std::move(name), std::move(at));
        return next;
    }

    std::optional<Coordinate> lookup(std::string_view name) const {
        auto it = bindings_.find(name);
        if (it == bindings_.end()) return std::nullopt;
        return it->second;
    }

    bool contains(std::string_view name) const { return bindings_.find(name) != bindings_.end(); }
    std::size_t size() const noexcept { return bindings_.size(); }
    const auto& bindings() const noexcept { return bindings_; }

private:
    std::map<std::string, Coordinate, std::less<>> bindings_;
};

}  // namespace memax::axial
