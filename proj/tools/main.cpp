#include <iostream>

#include "ctp/cli.hpp"

int main(int argc, char** argv) { return ctp::run_cli(argc, argv, std::cout, std::cerr); }
