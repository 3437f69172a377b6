#include <iostream>

#include "bdspec/cli.hpp"

int main(int argc, char** argv) { return bdspec::cli::run(argc, argv, std::cout, std::cerr); }
