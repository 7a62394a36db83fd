#include <iostream>

#include "nsk/cli.hpp"

int main(int argc, char** argv) { return nsk::run_cli(argc, argv, std::cout, std::cerr); }
