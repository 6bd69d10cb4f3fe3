#include <iostream>

#include "exarray/cli.hpp"

int main(int argc, char** argv) { return exarray::cli::run(argc, argv, std::cout, std::cerr); }
