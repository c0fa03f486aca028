#include <iostream>

#include "dogfight/cli.hpp"

int main(int argc, char** argv) { return dogfight::run_cli(argc, argv, std::cout, std::cerr); }
