#include <iostream>

#include "cli/commands.hpp"

int main(int argc, char** argv) { return gfou::cli::main_entry(argc, argv, std::cout, std::cerr); }
