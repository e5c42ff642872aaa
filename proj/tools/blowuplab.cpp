#include <iostream>
#include <string>
#include <vector>

#include "blowup/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv, argv + argc);
    return blowup::cli::run(args, std::cout, std::cerr);
}
