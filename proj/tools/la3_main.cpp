#include <iostream>

#include "la3/cli.hpp"

int main(int argc, char** argv) { return la3::cli::run(argc, argv, std::cin, std::cout, std::cerr); }
