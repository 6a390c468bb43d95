#include <iostream>

#include "epp_cli/cli.hpp"

int main(int argc, char** argv) { return epp::cli::run(argc, argv, std::cout, std::cerr); }
