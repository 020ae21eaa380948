#include <iostream>

#include "qlax_cli.hpp"

int main(int argc, char** argv) { return qlax::cli::run_cli(argc, argv, std::cout, std::cerr); }
