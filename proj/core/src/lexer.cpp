#include "memax/lexer.hpp"

#include <charconv>
#include <cstdio>

namespace memax {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_start(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        while (pos_ < src_.size()) next();
        return normalize(std::move(out_));
    }

private:
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    bool starts_with(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

    // A sign belongs to a numeral unless the previous token ends an atom,
    // in which case "+"/"-" are arithmetic modifiers.
    bool sign_position() const { return out_.empty() || !is_atom_kind(out_.back().kind); }

    void emit(TokenKind kind, std::size_t len) {
        out_.push_back(Token{kind, std::string(src_.substr(pos_, len)), Span{pos_, pos_ + len}});
        pos_ += len;
    }

    [[noreturn]] void fail(const std::string& message, std::size_t begin, std::size_t end) const {
        throw Error(Stage::Lex, message, Span{begin, end});
    }

    // Length of [+-]?digits(.digits)? at `at`, 0 if none.
    std::size_t number_length(std::size_t at, bool& is_decimal) const {
        std::size_t i = at;
        is_decimal = false;
        if (i < src_.size() && (src_[i] == '+' || src_[i] == '-')) ++i;
        const std::size_t digits_begin = i;
        while (i < src_.size() && is_digit(src_[i])) ++i;
        if (i == digits_begin) return 0;
        if (i + 1 < src_.size() && src_[i] == '.' && is_digit(src_[i + 1])) {
            is_decimal = true;
            ++i;
            while (i < src_.size() && is_digit(src_[i])) ++i;
        }
        return i - at;
    }

    void next() {
        const char c = peek();
        if (is_space(c)) {
            std::size_t len = 0;
            while (pos_ + len < src_.size() && is_space(src_[pos_ + len])) ++len;
            emit(TokenKind::Sep0, len);
            return;
        }
        if (c == ';') {
            emit(peek(1) == ';' ? TokenKind::Sep2 : TokenKind::Sep1, peek(1) == ';' ? 2 : 1);
            return;
        }
        if (c == '"') return quoted();
        if (c == '[') return embedding();
        if (is_digit(c) || ((c == '+' || c == '-') && is_digit(peek(1)) && sign_position())) {
            bool dec = false;
            const auto len = number_length(pos_, dec);
            emit(dec ? TokenKind::Dec : TokenKind::Int, len);
            return;
        }
        if (is_ident_start(c)) {
            std::size_t len = 1;
            while (is_ident_char(peek(len))) ++len;
            emit(len == 1 && c == '_' ? TokenKind::Wildcard : TokenKind::Alnum, len);
            return;
        }
        switch (c) {
            case '@': return emit(TokenKind::VectorSame, 1);
            case '^': return emit(TokenKind::MatrixSame, 1);
            case ':': return emit(TokenKind::TagColon, 1);
            case ',': return emit(TokenKind::Comma, 1);
            case '=': return emit(TokenKind::Cmp, 1);
            case '~': return emit(TokenKind::Cmp, 1);
            case '+':
            case '-':
            case '*':
            case '/': return emit(TokenKind::Mod, 1);
            case '$': {
                std::size_t len = 1;
                while (is_ident_char(peek(len))) ++len;
                const auto name = src_.substr(pos_ + 1, len - 1);
                if (name.empty() || !is_ident_start(name.front()) || name == "_") {
                    fail("bare \"$\" without a variable name", pos_, pos_ + len);
                }
                return emit(TokenKind::Var, len);
            }
            case '%':
                if (peek(1) == 'm' && !is_ident_char(peek(2))) return emit(TokenKind::MetaMark, 2);
                return emit(TokenKind::Mod, 1);
            case '<':
                if (starts_with("<=>") || starts_with("<->") || starts_with("<#>")) return emit(TokenKind::Mod, 3);
                return emit(TokenKind::Cmp, peek(1) == '=' ? 2 : 1);
            case '>': return emit(TokenKind::Cmp, peek(1) == '=' ? 2 : 1);
            case '!':
                if (peek(1) == '=' || peek(1) == '~') return emit(TokenKind::Cmp, 2);
                break;
            default: break;
        }
        char buf[32];
        const auto byte = static_cast<unsigned char>(c);
        if (byte >= 0x20 && byte < 0x7f) {
            std::snprintf(buf, sizeof buf, "illegal character '%c'", c);
        } else {
            std::snprintf(buf, sizeof buf, "illegal byte 0x%02x", byte);
        }
        fail(buf, pos_, pos_ + 1);
    }

    void quoted() {
        std::size_t i = pos_ + 1;
        while (i < src_.size()) {
            if (src_[i] == '\\') {
                if (i + 1 >= src_.size()) break;
                if (src_[i + 1] != '"' && src_[i + 1] != '\\') {
                    fail("invalid escape in quoted string", i, i + 2);
                }
                i += 2;
                continue;
            }
            if (src_[i] == '"') {
                emit(TokenKind::Quot, i + 1 - pos_);
                return;
            }
            ++i;
        }
        fail("unterminated quoted string", pos_, src_.size());
    }

    void embedding() {
        std::size_t i = pos_ + 1;
        for (;;) {
            bool dec = false;
            const auto len = number_length(i, dec);
            if (len == 0) fail("malformed embedding literal", pos_, i + 1);
            i += len;
            if (i < src_.size() && src_[i] == ',') {
                ++i;
                continue;
            }
            if (i < src_.size() && src_[i] == ']') break;
            fail("malformed embedding literal", pos_, std::min(i + 1, src_.size()));
        }
        emit(TokenKind::Emb, i + 1 - pos_);
    }

    static std::vector<Token> normalize(std::vector<Token> tokens) {
        std::vector<Token> out;
        out.reserve(tokens.size());
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (tokens[i].kind == TokenKind::Sep0) {
                const bool at_edge = i == 0 || i + 1 == tokens.size();
                const auto near_vector_sep = [](TokenKind k) { return k == TokenKind::Sep1 || k == TokenKind::Sep2; };
                if (at_edge || near_vector_sep(tokens[i - 1].kind) || near_vector_sep(tokens[i + 1].kind)) continue;
            }
            out.push_back(std::move(tokens[i]));
        }
        return out;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::vector<Token> out_;
};

}  // namespace

std::string_view kind_name(TokenKind kind) noexcept {
    switch (kind) {
        case TokenKind::Sep2: return "SEP2";
        case TokenKind::Sep1: return "SEP1";
        case TokenKind::Sep0: return "SEP0";
        case TokenKind::Alnum: return "ALNUM";
        case TokenKind::Quot: return "QUOT";
        case TokenKind::Int: return "INT";
        case TokenKind::Dec: return "DEC";
        case TokenKind::Wildcard: return "WILDCARD";
        case TokenKind::VectorSame: return "VECTORSAME";
        case TokenKind::MatrixSame: return "MATRIXSAME";
        case TokenKind::Var: return "VAR";
        case TokenKind::Emb: return "EMB";
        case TokenKind::Cmp: return "CMP";
        case TokenKind::Mod: return "MOD";
        case TokenKind::TagColon: return "TAGCOLON";
        case TokenKind::Comma: return "COMMA";
        case TokenKind::MetaMark: return "METAMARK";
    }
    return "?";
}

bool is_atom_kind(TokenKind kind) noexcept {
    switch (kind) {
        case TokenKind::Alnum:
        case TokenKind::Quot:
        case TokenKind::Int:
        case TokenKind::Dec:
        case TokenKind::Wildcard:
        case TokenKind::VectorSame:
        case TokenKind::MatrixSame:
        case TokenKind::Var:
        case TokenKind::Emb: return true;
        default: return false;
    }
}

std::vector<Token> lex(std::string_view source) { return Lexer(source).run(); }

std::optional<TokenKind> classify_atom(std::string_view lexeme) {
    if (lexeme.empty()) return std::nullopt;
    try {
        auto tokens = lex(lexeme);
        if (tokens.size() == 1 && is_atom_kind(tokens[0].kind) && tokens[0].lexeme.size() == lexeme.size()) {
            return tokens[0].kind;
        }
    } catch (const Error&) {
    }
    return std::nullopt;
}

std::string unquote(std::string_view lexeme) {
    std::string out;
    if (lexeme.size() < 2) return out;
    out.reserve(lexeme.size() - 2);
    for (std::size_t i = 1; i + 1 < lexeme.size(); ++i) {
        if (lexeme[i] == '\\' && i + 2 < lexeme.size()) ++i;
        out += lexeme[i];
    }
    return out;
}

std::string quote(std::string_view text) {
    std::string out = "\"";
    for (char c : text) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<double> parse_embedding(std::string_view lexeme) {
    std::vector<double> out;
    std::size_t i = 1;
    while (i < lexeme.size()) {
        std::size_t j = i;
        while (j < lexeme.size() && lexeme[j] != ',' && lexeme[j] != ']') ++j;
        auto part = lexeme.substr(i, j - i);
        if (!part.empty() && part.front() == '+') part.remove_prefix(1);
        double v = 0;
        std::from_chars(part.data(), part.data() + part.size(), v);
        out.push_back(v);
        i = j + 1;
    }
    return out;
}

std::string format_tokens(const std::vector<Token>& tokens) {
    std::string out;
    for (const auto& t : tokens) {
        out += kind_name(t.kind);
        out += '\t';
        for (char c : t.lexeme) {
            switch (c) {
                case '\n': out += "\\n"; break;
                case '\t': out += "\\t"; break;
                case '\r': out += "\\r"; break;
                default: out += c;
            }
        }
        out += '\t';
        out += std::to_string(t.span.begin);
        out += "..";
        out += std::to_string(t.span.end);
        out += '\n';
    }
    return out;
}

}  // namespace memax
