#include <iostream>

#include "tumorsim/cli.hpp"

int main(int argc, char** argv) { return tumorsim::run_cli(argc, argv, std::cout, std::cerr); }
