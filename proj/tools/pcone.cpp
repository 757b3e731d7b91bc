#include <iostream>

#include "pcone/cli.hpp"

int main(int argc, char** argv) { return pcone::run_cli(argc, argv, std::cout, std::cerr); }
