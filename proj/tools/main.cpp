#include <iostream>

#include "explorer/cli.hpp"

int main(int argc, char** argv) { return explorer::run_cli(argc, argv, std::cout, std::cerr); }
