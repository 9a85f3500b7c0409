#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return kalda::cli::run(argc, argv, std::cout, std::cerr); }
