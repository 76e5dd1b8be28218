#include "properties.hpp"

#include <regex>
#include <sstream>

#include "generators.hpp"
#include "memax/memax.hpp"

namespace memax::testkit {

namespace {

using axial::Coordinate;

std::size_t count_atoms(const IntGrid& g) {
    std::size_t n = 0;
    for (const auto& [x, cell] : g) n += cell.atoms.size();
    return n;
}

// Coordinate of each atom computed without the scan state machine: the
// rank-r component is the number of rank-r separators since the last
// separator of higher rank.
IntGrid counting_oracle(const std::vector<IntToken>& tokens, std::size_t arity) {
    IntGrid grid(arity);
    for (std::size_t p = 0; p < tokens.size(); ++p) {
        if (!std::holds_alternative<int>(tokens[p])) continue;
        Coordinate x(arity);
        for (std::size_t r = 0; r < arity; ++r) {
            std::size_t n = 0;
            for (std::size_t q = p; q-- > 0;) {
                const auto* sep = std::get_if<axial::Separator>(&tokens[q]);
                if (!sep) continue;
                if (sep->rank > r) break;
                if (sep->rank == r) ++n;
            }
            x[r] = n;
        }
        grid.append(x, std::get<int>(tokens[p]), p);
    }
    return grid;
}

std::string show(const std::vector<IntToken>& tokens) {
    std::ostringstream out;
    for (const auto& t : tokens) {
        if (const auto* sep = std::get_if<axial::Separator>(&t)) {
            out << "|" << sep->rank << " ";
        } else {
            out << std::get<int>(t) << " ";
        }
    }
    return out.str();
}

}  // namespace

Outcome check_update_law() {
    Outcome out;
    constexpr std::size_t kMax = 5;
    for (std::size_t a = 0; a <= kMax; ++a) {
        for (std::size_t b = 0; b <= kMax; ++b) {
            for (std::size_t c = 0; c <= kMax; ++c) {
                const auto x = Coordinate::from_high({a, b, c});
                for (axial::Rank r = 0; r < 3; ++r) {
                    ++out.cases;
                    const auto y = axial::advance(x, r);
                    for (axial::Rank m = 0; m < 3; ++m) {
                        const std::size_t want = m > r ? x[m] : m == r ? x[m] + 1 : 0;
                        if (y[m] != want) {
                            out.fail("U_" + std::to_string(r) + x.str() + " = " + y.str());
                        }
                    }
                }
            }
        }
    }
    return out;
}

Outcome check_reversal_involution(std::uint64_t seed, std::size_t grids) {
    Outcome out;
    Rng rng(seed);
    for (std::size_t i = 0; i < grids; ++i) {
        const std::size_t arity = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
        const auto grid = random_grid(rng, arity, 5, 0.3);
        const axial::Rank r = std::uniform_int_distribution<std::size_t>(0, arity - 1)(rng);
        const auto map = axial::reverse_reindex(grid, r);
        const auto once = axial::reindex(grid, map);
        const auto twice = axial::reindex(once, map);
        ++out.cases;
        if (!(twice == grid)) out.fail("grid " + std::to_string(i) + ": reversal twice differs");
        if (once.size() != grid.size() || count_atoms(once) != count_atoms(grid)) {
            out.fail("grid " + std::to_string(i) + ": reversal lost cells");
        }
        for (const auto& [x, cell] : grid) {
            if (map.forward(map.forward(x)) != x) out.fail("pi(pi(" + x.str() + ")) != " + x.str());
        }
    }
    return out;
}

Outcome check_streaming_scan(std::uint64_t seed, std::size_t streams, std::size_t max_len) {
    Outcome out;
    Rng rng(seed);
    for (std::size_t i = 0; i < streams; ++i) {
        const std::size_t arity = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
        const auto tokens = random_stream(rng, max_len, arity);
        axial::Scanner<int> scanner(arity);
        for (std::size_t k = 0; k <= tokens.size(); ++k) {
            const std::vector<IntToken> prefix(tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(k));
            if (!(scanner.grid() == axial::scan(prefix, arity))) {
                out.fail("stream " + show(tokens) + ": prefix " + std::to_string(k) + " differs from batch");
            }
            if (k < tokens.size()) scanner.feed(tokens[k]);
        }
        ++out.cases;
        if (!(scanner.grid() == counting_oracle(tokens, arity))) {
            out.fail("stream " + show(tokens) + ": differs from counting oracle");
        }
    }
    return out;
}

Outcome check_carry_forward(std::uint64_t seed, std::size_t grids) {
    Outcome out;
    Rng rng(seed);
    for (std::size_t i = 0; i < grids; ++i) {
        const std::size_t arity = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
        const std::size_t extent = 6;
        std::map<Coordinate, int> e;
        for (const auto& [x, cell] : random_grid(rng, arity, extent, 0.15)) e.emplace(x, cell.atoms.front());

        // Every point of the box, every rank.
        std::size_t total = 1;
        for (std::size_t k = 0; k < arity; ++k) total *= extent;
        for (std::size_t flat = 0; flat < total; ++flat) {
            Coordinate x(arity);
            std::size_t rest = flat;
            for (std::size_t k = 0; k < arity; ++k) {
                x[k] = rest % extent;
                rest /= extent;
            }
            for (axial::Rank r = 0; r < arity; ++r) {
                // Brute force: defined y on the same line with the largest y[r] <= x[r].
                const int* want = nullptr;
                std::size_t best = 0;
                for (const auto& [y, v] : e) {
                    bool same_line = true;
                    for (axial::Rank m = 0; m < arity; ++m) {
                        if (m != r && y[m] != x[m]) same_line = false;
                    }
                    if (!same_line || y[r] > x[r]) continue;
                    if (!want || y[r] >= best) {
                        want = &v;
                        best = y[r];
                    }
                }
                ++out.cases;
                if (axial::carry_forward(e, r, x) != want) {
                    out.fail("cf_" + std::to_string(r) + x.str() + " in grid " + std::to_string(i));
                }
            }
        }
    }
    return out;
}

Outcome check_round_trip(std::string_view source) {
    Outcome out;
    ++out.cases;
    try {
        const auto first = parse(lex(source));
        const auto rendered = render(first);
        const auto second = parse(lex(rendered));
        if (!(second == first)) out.fail("IR changed after render: " + std::string(source) + " -> " + rendered);
        const auto again = render(second);
        if (again != rendered) out.fail("render not idempotent: " + rendered + " -> " + again);
    } catch (const Error& e) {
        out.fail(std::string(source) + ": " + e.describe());
    }
    return out;
}

Outcome check_round_trip_random(std::uint64_t seed, std::size_t queries) {
    Outcome out;
    Rng rng(seed);
    for (std::size_t i = 0; i < queries; ++i) {
        const auto source = random_query(rng);
        const auto one = check_round_trip(source);
        ++out.cases;
        if (!one.ok) out.fail(one.detail);
    }
    return out;
}

const std::vector<std::string>& sql_metacharacters() {
    static const std::vector<std::string> kMeta{"'", "\"", ";", "--", "/*", "*/", "\\"};
    return kMeta;
}

Outcome check_quot_safety(std::uint64_t seed, std::size_t inputs) {
    Outcome out;
    Rng rng(seed);
    CompileOptions options;
    for (std::size_t i = 0; i < inputs; ++i) {
        const auto a = hostile_text(rng);
        const auto b = hostile_text(rng);
        const std::string qa = quote(a);
        const std::string qb = quote(b);
        std::vector<std::string> expect_params;
        std::string source;
        switch (i % 5) {
            case 0: source = "movies title " + qa + ";;"; expect_params = {a}; break;
            case 1: source = "movies title =" + qa + "," + qb + ";;"; expect_params = {a, b}; break;
            case 2: source = "movies title !~" + qa + ";year >" + qb + ";;"; expect_params = {a, b}; break;
            case 3: source = "movies description <=>" + qa + "<0.3;title _;;"; break;
            default:
                source = "roles actor :$a=" + qa + ";movie _;@ @ @;actor !=$a;;";
                expect_params = {a};
                break;
        }
        ++out.cases;
        try {
            const auto resolved = resolve(parse(lex(source)));
            const auto artifact = compile(resolved.at(0), options);
            for (const auto& meta : sql_metacharacters()) {
                if (artifact.sql.find(meta) != std::string::npos) {
                    out.fail("metacharacter " + meta + " in SQL for " + source + ": " + artifact.sql);
                }
            }
            for (const auto& want : expect_params) {
                bool found = false;
                for (const auto& p : artifact.params) {
                    if (const auto* s = std::get_if<std::string>(&p.value); s && *s == want) found = true;
                }
                if (!found) out.fail("value not routed to a parameter: " + source);
            }
        } catch (const Error& e) {
            out.fail(source + ": " + e.describe());
        }
    }
    return out;
}

Outcome check_identifier_gate(std::uint64_t seed, std::size_t inputs) {
    Outcome out;
    Rng rng(seed);
    static const std::regex kIdent("[A-Za-z_][A-Za-z0-9_]*");
    for (std::size_t i = 0; i < inputs; ++i) {
        const auto name = random_identifier_candidate(rng);
        const bool want = std::regex_match(name, kIdent) && !is_reserved_word(name);
        bool got = true;
        try {
            if (quote_identifier(name) != name) out.fail("identifier rewritten: " + name);
        } catch (const Error& e) {
            got = false;
            if (e.stage() != Stage::Compile) out.fail("wrong stage for " + name);
        }
        ++out.cases;
        if (got != want) out.fail("identifier '" + name + "' " + (got ? "accepted" : "rejected"));
    }
    return out;
}

}  // namespace memax::testkit
