#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return c1mixed::run_cli(argc, argv, std::cout, std::cerr); }
