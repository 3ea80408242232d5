#include <iostream>

#include "hcma/cli.hpp"

int main(int argc, char** argv) { return hcma::cli::run(argc, argv, std::cout, std::cerr); }
