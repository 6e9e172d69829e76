#include <iostream>

#include "catqnd/cli.hpp"

int main(int argc, char** argv) { return catqnd::cli::main(argc, argv, std::cout, std::cerr); }
