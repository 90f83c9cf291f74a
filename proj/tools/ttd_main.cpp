#include <iostream>

#include "ttd/cli/commands.hpp"

int main(int argc, char** argv) { return ttd::cli::run_cli(argc, argv, std::cout, std::cerr); }
