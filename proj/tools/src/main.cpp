#include <iostream>

#include "netmod_cli/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return netmod::cli::run(args, std::cout, std::cerr);
}
