#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return pcboost::cli::run(argc, argv, std::cout, std::cerr); }
