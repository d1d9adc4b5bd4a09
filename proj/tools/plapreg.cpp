#include <iostream>

#include "plapreg/cli.hpp"

int main(int argc, char** argv) { return plapreg::run_cli(argc, argv, std::cout, std::cerr); }
