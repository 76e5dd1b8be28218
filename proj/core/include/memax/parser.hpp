#pragma once

#include <span>
#include <string>
#include <vector>

#include "memax/axial.hpp"
#include "memax/ir.hpp"
#include "memax/lexer.hpp"

namespace memax {

/// Incremental parser. Tokens are placed on the 3-axis grid as they
/// arrive; each vector is right-aligned and interpreted when its closing
/// separator is seen, so errors surface at the earliest vector that
/// contains them. Throws memax::Error (Stage::Parse).
class StreamingParser {
public:
    StreamingParser();

    void feed(const Token& token);

    /// Matrices closed so far.
    const Query& matrices() const noexcept { return done_; }

    /// Raw scan state (Axis:2, Axis:1, Axis:0) before right alignment.
    const Coordinate& state() const noexcept { return scanner_.state(); }

    /// Ends the stream; throws if the last matrix is not closed by ";;".
    Query finish();

private:
    void close_vector(const Token& sep);
    void close_matrix(const Token& sep);

    axial::Scanner<Token> scanner_;
    axial::CellGrid<Token> pending_{kArity};
    bool pending_is_meta_ = false;
    MatrixIR current_;
    Query done_;
    Span last_span_;
};

/// query := (matrix ";;")+
Query parse(std::span<const Token> tokens);
inline Query parse(const std::vector<Token>& tokens) { return parse(std::span<const Token>(tokens)); }

/// Interprets one Axis:0 cell of the value slot.
/// limit := left | right | (cmp right) | (left cmp right)
Limit parse_limit(std::span<const Token> cell, const Coordinate& coord);

/// Interprets a meta vector: "%m" followed by key/value pairs (lim, off, sim).
MetaDirectives parse_meta(std::span<const Token> atoms);

/// Canonical source form: single spaces between limits, no optional
/// whitespace, meta vectors at their original positions.
std::string render(const Query& query);
std::string render(const MatrixIR& matrix);
std::string render(const VectorIR& vector);
std::string render(const Limit& limit);
std::string render(const Term& term);
std::string render(const Atom& atom);

/// One line per Axis:0 cell: (a2,a1,a0)<TAB>role<TAB>text. A vector whose
/// table slot is inherited gets a "Table (carried)" line shown as "(@)".
std::string format_coordinates(const Query& query);

}  // namespace memax
