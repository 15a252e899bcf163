#include <iostream>
#include <string>
#include <vector>

#include "cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return jitcluster::cli::parse_and_run(args, std::cout, std::cerr, jitcluster::cli::detect_terminal());
}
