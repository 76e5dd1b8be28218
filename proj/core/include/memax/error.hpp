#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace memax {

/// Byte offsets into the source text, half-open.
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;

    friend bool operator==(const Span&, const Span&) = default;
};

enum class Stage { Lex, Parse, Resolve, Compile, Execute };

std::string_view stage_name(Stage stage) noexcept;

/// Process exit code for a failure in `stage`: lex/parse 1, resolve 2,
/// compile 3, execute 4.
int exit_code(Stage stage) noexcept;

class Error : public std::runtime_error {
public:
    Error(Stage stage, std::string message, Span span = {})
        : std::runtime_error(std::move(message)), stage_(stage), span_(span) {}

    Stage stage() const noexcept { return stage_; }
    const Span& span() const noexcept { return span_; }

    /// "<stage> error at <begin>..<end>: <message>"
    std::string describe() const;

private:
    Stage stage_;
    Span span_;
};

inline std::string_view stage_name(Stage stage) noexcept {
    switch (stage) {
        case Stage::Lex: return "lex";
        case Stage::Parse: return "parse";
        case Stage::Resolve: return "resolve";
        case Stage::Compile: return "compile";
        case Stage::Execute: return "execute";
    }
    return "unknown";
}

inline int exit_code(Stage stage) noexcept {
    switch (stage) {
        case Stage::Lex:
        case Stage::Parse: return 1;
        case Stage::Resolve: return 2;
        case Stage::Compile: return 3;
        case Stage::Execute: return 4;
    }
    return 1;
}

inline std::string Error::describe() const {
    std::string out{stage_name(stage_)};
    out += " error at ";
    out += std::to_string(span_.begin);
    out += "..";
    out += std::to_string(span_.end);
    out += ": ";
    out += what();
    return out;
}

}  // namespace memax
