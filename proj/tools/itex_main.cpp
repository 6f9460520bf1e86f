#include <iostream>

#include "itex/commands.hpp"

int main(int argc, char** argv) { return itex::run_cli(argc, argv, std::cout, std::cerr); }
