#include <iostream>

#include "vgmm/cli.hpp"

int main(int argc, char** argv) { return vgmm::run_cli(argc, argv, std::cout, std::cerr); }
