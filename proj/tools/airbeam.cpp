#include <iostream>

#include "airbeam/cli.hpp"

int main(int argc, char** argv) { return airbeam::cli::run(argc, argv, std::cout, std::cerr); }
