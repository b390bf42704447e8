#include <iostream>

#include "maxlrt/cli.hpp"

int main(int argc, char** argv) { return maxlrt::run_cli(argc, argv, std::cout, std::cerr); }
