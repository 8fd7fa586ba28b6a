#include <iostream>

#include "randpoly/cli.hpp"

int main(int argc, char** argv) { return randpoly::cli::run(argc, argv, std::cout, std::cerr); }
