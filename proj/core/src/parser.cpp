#include "memax/parser.hpp"

#include <algorithm>
#include <charconv>

namespace memax {

std::string_view comparator_lexeme(Comparator cmp) noexcept {
    switch (cmp) {
        case Comparator::Eq: return "=";
        case Comparator::Ne: return "!=";
        case Comparator::Gt: return ">";
        case Comparator::Ge: return ">=";
        case Comparator::Lt: return "<";
        case Comparator::Le: return "<=";
        case Comparator::Match: return "~";
        case Comparator::NotMatch: return "!~";
    }
    return "=";
}

std::optional<Comparator> parse_comparator(std::string_view s) noexcept {
    if (s == "=") return Comparator::Eq;
    if (s == "!=") return Comparator::Ne;
    if (s == ">") return Comparator::Gt;
    if (s == ">=") return Comparator::Ge;
    if (s == "<") return Comparator::Lt;
    if (s == "<=") return Comparator::Le;
    if (s == "~") return Comparator::Match;
    if (s == "!~") return Comparator::NotMatch;
    return std::nullopt;
}

std::string_view slot_role(Slot slot) noexcept {
    switch (slot) {
        case Slot::Table: return "Table";
        case Slot::Column: return "Column";
        case Slot::Value: return "Value";
    }
    return "?";
}

std::string_view func_name(FuncTag tag) noexcept {
    switch (tag) {
        case FuncTag::Grp: return "grp";
        case FuncTag::Asc: return "asc";
        case FuncTag::Des: return "des";
        case FuncTag::Sum: return "sum";
        case FuncTag::Cnt: return "cnt";
        case FuncTag::Min: return "min";
        case FuncTag::Max: return "max";
        case FuncTag::Avg: return "avg";
        case FuncTag::Last: return "last";
    }
    return "?";
}

std::optional<FuncTag> parse_func(std::string_view name) noexcept {
    for (auto tag : {FuncTag::Grp, FuncTag::Asc, FuncTag::Des, FuncTag::Sum, FuncTag::Cnt, FuncTag::Min,
                     FuncTag::Max, FuncTag::Avg, FuncTag::Last}) {
        if (func_name(tag) == name) return tag;
    }
    return std::nullopt;
}

bool is_aggregate(FuncTag tag) noexcept {
    switch (tag) {
        case FuncTag::Sum:
        case FuncTag::Cnt:
        case FuncTag::Min:
        case FuncTag::Max:
        case FuncTag::Avg:
        case FuncTag::Last: return true;
        default: return false;
    }
}

namespace {

using Tokens = std::span<const Token>;

[[noreturn]] void fail(const std::string& message, Span span) { throw Error(Stage::Parse, message, span); }

Span span_of(Tokens tokens) {
    if (tokens.empty()) return {};
    return Span{tokens.front().span.begin, tokens.back().span.end};
}

std::string text_of(Tokens tokens) {
    std::string out;
    for (const auto& t : tokens) out += t.lexeme;
    return out;
}

Atom to_atom(const Token& t) {
    Atom a{t.kind, t.lexeme, t.span};
    if (t.kind == TokenKind::Quot) a.text = unquote(t.lexeme);
    if (t.kind == TokenKind::Var) a.text = t.lexeme.substr(1);
    return a;
}

Atom implicit_wildcard(Span at) { return Atom{TokenKind::Wildcard, "_", Span{at.end, at.end}}; }

// term := atom | (mod atom) | (atom mod atom)
Term parse_term(Tokens t) {
    const auto atom_at = [&](std::size_t i) {
        if (!is_atom_kind(t[i].kind)) fail("expected an atom, found '" + t[i].lexeme + "'", t[i].span);
        return to_atom(t[i]);
    };
    if (t.empty()) fail("empty term", {});
    if (t.size() == 1) return Term::atom(atom_at(0));
    if (t.size() == 2 && t[0].kind == TokenKind::Mod) return Term{Term::Shape::ModAtom, t[0].lexeme, {atom_at(1)}};
    if (t.size() == 3 && t[1].kind == TokenKind::Mod) {
        return Term{Term::Shape::Binary, t[1].lexeme, {atom_at(0), atom_at(2)}};
    }
    fail("malformed term '" + text_of(t) + "'", span_of(t));
}

// right := term ("," term)*
std::vector<Term> parse_terms(Tokens t) {
    std::vector<Term> out;
    std::size_t begin = 0;
    for (std::size_t i = 0; i <= t.size(); ++i) {
        if (i == t.size() || t[i].kind == TokenKind::Comma) {
            if (i == begin) fail("empty term in disjunction", i < t.size() ? t[i].span : span_of(t));
            out.push_back(parse_term(t.subspan(begin, i - begin)));
            begin = i + 1;
        }
    }
    return out;
}

// left := (term)? (":" func)*
void parse_left(Tokens t, Limit& limit) {
    std::size_t tags_at = t.size();
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i].kind == TokenKind::TagColon) {
            tags_at = i;
            break;
        }
    }
    if (tags_at > 0) {
        auto term_tokens = t.first(tags_at);
        for (const auto& tok : term_tokens) {
            if (tok.kind == TokenKind::Comma) fail("comma disjunction on the left of a comparator", tok.span);
        }
        limit.left = parse_term(term_tokens);
    }
    for (std::size_t i = tags_at; i < t.size(); i += 2) {
        if (t[i].kind != TokenKind::TagColon || i + 1 >= t.size()) fail("malformed tag chain", span_of(t.subspan(i)));
        const auto& name = t[i + 1];
        if (name.kind == TokenKind::Var) {
            limit.funcs.emplace_back(Binding{name.lexeme.substr(1)});
        } else if (auto tag = name.kind == TokenKind::Alnum ? parse_func(name.lexeme) : std::nullopt) {
            limit.funcs.emplace_back(*tag);
        } else {
            fail("unknown tag ':" + name.lexeme + "'", name.span);
        }
    }
}

bool is_slot_atom(TokenKind k) {
    return k == TokenKind::Alnum || k == TokenKind::Wildcard || k == TokenKind::VectorSame ||
           k == TokenKind::MatrixSame || k == TokenKind::Var;
}

Limit parse_slot(Tokens cell, const Coordinate& coord) {
    const auto role = std::string(slot_role(static_cast<Slot>(coord[0])));
    if (cell.size() == 1 && is_slot_atom(cell[0].kind)) {
        Limit l;
        l.coord = coord;
        l.right.push_back(Term::atom(to_atom(cell[0])));
        l.span = cell[0].span;
        l.text = cell[0].lexeme;
        return l;
    }
    const auto has = [&](TokenKind k) {
        return std::any_of(cell.begin(), cell.end(), [k](const Token& t) { return t.kind == k; });
    };
    if (has(TokenKind::TagColon)) fail("FUNC tags are only allowed in the value slot", span_of(cell));
    if (has(TokenKind::Comma)) fail("comma disjunction in the " + role + " slot", span_of(cell));
    if (has(TokenKind::Cmp)) fail("comparator outside the value slot", span_of(cell));
    fail(role + " slot must be a single identifier, found '" + text_of(cell) + "'", span_of(cell));
}

struct MetaParse {
    MetaDirectives directives;
    std::vector<std::pair<std::string, Atom>> entries;
};

std::optional<std::int64_t> non_negative_int(const Token& t) {
    if (t.kind != TokenKind::Int) return std::nullopt;
    std::string_view s = t.lexeme;
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || v < 0) return std::nullopt;
    return v;
}

MetaParse parse_meta_entries(Tokens atoms) {
    if (atoms.empty() || atoms[0].kind != TokenKind::MetaMark) fail("meta vector must start with %m", span_of(atoms));
    MetaParse out;
    for (std::size_t i = 1; i < atoms.size(); i += 2) {
        const auto& key = atoms[i];
        if (key.kind != TokenKind::Alnum) fail("expected a meta key, found '" + key.lexeme + "'", key.span);
        if (i + 1 >= atoms.size()) fail("meta key '" + key.lexeme + "' has no value", key.span);
        const auto& value = atoms[i + 1];
        const auto duplicate = [&] { fail("duplicate meta key '" + key.lexeme + "'", key.span); };
        if (key.lexeme == "lim" || key.lexeme == "off") {
            auto n = non_negative_int(value);
            if (!n) fail("meta " + key.lexeme + " requires a non-negative integer, found '" + value.lexeme + "'", value.span);
            auto& slot = key.lexeme == "lim" ? out.directives.lim : out.directives.off;
            if (slot) duplicate();
            slot = n;
        } else if (key.lexeme == "sim") {
            if (value.kind != TokenKind::Int && value.kind != TokenKind::Dec && value.kind != TokenKind::Var) {
                fail("meta sim requires a number or variable, found '" + value.lexeme + "'", value.span);
            }
            if (out.directives.sim) duplicate();
            out.directives.sim = to_atom(value);
        } else {
            fail("unknown meta key '" + key.lexeme + "'", key.span);
        }
        out.entries.emplace_back(key.lexeme, to_atom(value));
    }
    return out;
}

void merge(MetaDirectives& into, const MetaDirectives& from, Span span) {
    const auto dup = [&](const char* key) { fail(std::string("duplicate meta key '") + key + "'", span); };
    if (from.lim) {
        if (into.lim) dup("lim");
        into.lim = from.lim;
    }
    if (from.off) {
        if (into.off) dup("off");
        into.off = from.off;
    }
    if (from.sim) {
        if (into.sim) dup("sim");
        into.sim = from.sim;
    }
}

}  // namespace

Limit parse_limit(std::span<const Token> cell, const Coordinate& coord) {
    if (cell.empty()) fail("empty limit", {});
    Limit limit;
    limit.coord = coord;
    limit.span = span_of(cell);
    limit.text = text_of(cell);

    std::optional<std::size_t> cmp_at;
    bool has_tags = false;
    for (std::size_t i = 0; i < cell.size(); ++i) {
        const auto& t = cell[i];
        if (t.kind == TokenKind::Cmp) {
            if (cmp_at) fail("two comparators in one limit '" + limit.text + "'", t.span);
            cmp_at = i;
        } else if (t.kind == TokenKind::TagColon) {
            if (cmp_at) fail("FUNC tags must precede the comparator", t.span);
            has_tags = true;
        } else if (t.kind == TokenKind::MetaMark) {
            fail("%m must start a vector", t.span);
        }
    }

    if (cmp_at) {
        limit.cmp = *parse_comparator(cell[*cmp_at].lexeme);
        auto right = cell.subspan(*cmp_at + 1);
        if (right.empty()) fail("missing value after comparator", cell[*cmp_at].span);
        parse_left(cell.first(*cmp_at), limit);
        limit.right = parse_terms(right);
    } else if (has_tags || (cell.size() == 2 && cell[0].kind == TokenKind::Mod)) {
        // Tags or a bare modified term with nothing to compare against
        // apply to an implicit wildcard value.
        parse_left(cell, limit);
        limit.right.push_back(Term::atom(implicit_wildcard(limit.span)));
    } else {
        limit.right = parse_terms(cell);
    }
    return limit;
}

MetaDirectives parse_meta(std::span<const Token> atoms) { return parse_meta_entries(atoms).directives; }

StreamingParser::StreamingParser() : scanner_(kArity) {}

void StreamingParser::feed(const Token& token) {
    last_span_ = token.span;
    switch (token.kind) {
        case TokenKind::Sep2:
            close_vector(token);
            close_matrix(token);
            scanner_.feed_separator(2);
            return;
        case TokenKind::Sep1:
            close_vector(token);
            scanner_.feed_separator(1);
            return;
        case TokenKind::Sep0: scanner_.feed_separator(0); return;
        default: break;
    }
    const auto& at = scanner_.state();
    if (token.kind == TokenKind::MetaMark) {
        if (!pending_.empty() || at[0] != 0) fail("%m must start a vector", token.span);
        pending_is_meta_ = true;
    }
    if (!pending_is_meta_ && at[0] >= 3) {
        fail("vector has more than 3 limits (table, column, value)", token.span);
    }
    pending_.append(at, token, scanner_.position());
    scanner_.feed_atom(token);
}

void StreamingParser::close_vector(const Token& sep) {
    const auto& at = scanner_.state();
    if (pending_.empty()) {
        if (sep.kind == TokenKind::Sep2) {
            if (current_.vectors.empty() && current_.meta.empty()) fail("empty matrix", sep.span);
            return;  // trailing ';' before ';;'
        }
        fail("empty vector", sep.span);
    }

    std::vector<Token> flat;
    for (const auto& [x, cell] : pending_) flat.insert(flat.end(), cell.atoms.begin(), cell.atoms.end());
    const Span vector_span = span_of(flat);

    if (pending_is_meta_) {
        for (const auto& [x, cell] : pending_) {
            if (cell.atoms.size() != 1) fail("meta directives must be space-separated words", span_of(cell.atoms));
        }
        auto meta = parse_meta_entries(flat);
        merge(current_.directives, meta.directives, vector_span);
        current_.meta.push_back(MetaVector{at[1], std::move(meta.entries), vector_span});
    } else {
        const auto align = axial::reverse_reindex(pending_, 0);
        const auto effective = axial::reindex(pending_, align);
        VectorIR vec;
        vec.matrix = at[2];
        vec.index = at[1];
        vec.span = vector_span;
        for (const auto& [x, cell] : effective) {
            const auto slot = static_cast<Slot>(x[0]);
            vec.limits.push_back(slot == Slot::Value ? parse_limit(cell.atoms, x) : parse_slot(cell.atoms, x));
        }
        std::reverse(vec.limits.begin(), vec.limits.end());
        current_.vectors.push_back(std::move(vec));
    }
    pending_ = axial::CellGrid<Token>(kArity);
    pending_is_meta_ = false;
}

void StreamingParser::close_matrix(const Token& sep) {
    current_.index = scanner_.state()[2];
    const auto begin = !current_.vectors.empty() ? current_.vectors.front().span.begin
                                                 : current_.meta.front().span.begin;
    current_.span = Span{std::min(begin, current_.meta.empty() ? begin : current_.meta.front().span.begin),
                         sep.span.end};
    done_.push_back(std::move(current_));
    current_ = MatrixIR{};
}

Query StreamingParser::finish() {
    if (!pending_.empty() || !current_.vectors.empty() || !current_.meta.empty()) {
        fail("unterminated matrix: expected ';;'", last_span_);
    }
    if (done_.empty()) fail("empty query: expected at least one matrix terminated by ';;'", last_span_);
    return std::move(done_);
}

Query parse(std::span<const Token> tokens) {
    StreamingParser parser;
    for (const auto& t : tokens) parser.feed(t);
    return parser.finish();
}

}  // namespace memax
