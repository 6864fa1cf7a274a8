#include <iostream>

#include "finslerlab/cli.hpp"

int main(int argc, char** argv) { return finslerlab::cli::run_cli(argc, argv, std::cout, std::cerr); }
