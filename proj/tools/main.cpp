#include <iostream>

#include "preint/cli.hpp"

int main(int argc, char** argv) { return preint::run_cli(argc, argv, std::cout, std::cerr); }
