#include <iostream>

#include "fastsize/cli.hpp"

int main(int argc, char** argv) { return fastsize::run_cli(argc, argv, std::cout, std::cerr); }
