#include "cvqsdc/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return cvqsdc::cli::main(argc, argv, std::cout, std::cerr); }
