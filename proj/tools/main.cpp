#include <iostream>
#include <string>
#include <vector>

#include "pmkit/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return pmkit::cli::run(args, std::cout, std::cerr);
}
