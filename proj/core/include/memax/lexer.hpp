#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "memax/error.hpp"

namespace memax {

enum class TokenKind {
    Sep2,        // ";;"  matrix separator
    Sep1,        // ";"   vector separator
    Sep0,        // whitespace run, limit separator
    Alnum,
    Quot,
    Int,
    Dec,
    Wildcard,    // "_"
    VectorSame,  // "@"
    MatrixSame,  // "^"
    Var,         // "$name"
    Emb,         // "[1.0,2.0]"
    Cmp,
    Mod,
    TagColon,    // ":"
    Comma,
    MetaMark,    // "%m"
};

std::string_view kind_name(TokenKind kind) noexcept;

/// Atom classes are the token kinds that may stand alone as a term.
bool is_atom_kind(TokenKind kind) noexcept;

struct Token {
    TokenKind kind;
    std::string lexeme;  // exact source text
    Span span;

    friend bool operator==(const Token&, const Token&) = default;
};

/// Tokenizes Memelang source by maximal munch. Whitespace runs become one
/// Sep0; Sep0 next to Sep1/Sep2 or at either end of the stream is dropped.
/// Throws memax::Error (Stage::Lex) on an unterminated quote, a bare "$",
/// an invalid escape, or an illegal character.
std::vector<Token> lex(std::string_view source);

/// Class of a complete lexeme as it would stand alone in atom position, or
/// nullopt if the lexeme is not an atom.
std::optional<TokenKind> classify_atom(std::string_view lexeme);

/// Decoded contents of a QUOT lexeme (quotes stripped, escapes resolved).
std::string unquote(std::string_view lexeme);

/// QUOT lexeme for `text`, escaping only '"' and '\'.
std::string quote(std::string_view text);

/// Components of an EMB lexeme like "[0.1,-2,3.5]".
std::vector<double> parse_embedding(std::string_view lexeme);

/// One token per line: KIND<TAB>lexeme<TAB>begin..end
std::string format_tokens(const std::vector<Token>& tokens);

}  // namespace memax
