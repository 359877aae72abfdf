#include <iostream>

#include "susylab/cli.hpp"

int main(int argc, char** argv) { return susylab::run_cli(argc, argv, std::cout, std::cerr); }
