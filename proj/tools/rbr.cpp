#include <iostream>

#include "rbr/cli.hpp"

int main(int argc, char** argv) { return rbr::run_cli(argc, argv, std::cout, std::cerr); }
