#include "pcsft/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return pcsft::cli::run(argc, argv, std::cout, std::cerr); }
