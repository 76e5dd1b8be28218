#include <iostream>

#include "memax_cli/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return memax::cli::run(args, {std::cin, std::cout, std::cerr, memax::cli::system_getenv});
}
