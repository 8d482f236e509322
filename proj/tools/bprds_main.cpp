#include <iostream>

#include "bprds/cli.hpp"

int main(int argc, char** argv) { return bprds::cli::run(argc, argv, std::cout, std::cerr); }
