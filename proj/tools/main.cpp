#include "cli.hpp"

#include "astref/runtime.hpp"

#include <iostream>

int main(int argc, char** argv) {
    astref::tune_allocator();
    std::ios::sync_with_stdio(false);
    return astref::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cin, std::cout, std::cerr);
}
