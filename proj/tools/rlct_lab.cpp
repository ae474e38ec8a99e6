#include <iostream>

#include "rlct/cli.hpp"

int main(int argc, char** argv) { return rlct::cli::run(argc, argv, std::cout, std::cerr); }
