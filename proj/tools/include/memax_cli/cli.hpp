#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace memax::cli {

struct Io {
    std::istream& in;
    std::ostream& out;
    std::ostream& err;
    std::function<std::optional<std::string>(std::string_view)> getenv;
};

/// Process environment lookup.
std::optional<std::string> system_getenv(std::string_view name);

/// Runs the command line `args` (args[0] is the program name) and returns
/// the process exit code: 0 ok, 1 lex/parse, 2 resolve, 3 compile, 4 execute.
int run(const std::vector<std::string>& args, Io io);

}  // namespace memax::cli
