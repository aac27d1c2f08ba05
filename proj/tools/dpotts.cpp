#include <iostream>

#include "dpotts/cli/commands.hpp"

int main(int argc, char** argv) { return dpotts::cli::run_cli(argc, argv, std::cout, std::cerr); }
