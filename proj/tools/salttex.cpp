#include <iostream>

#include "salttex/cli.hpp"

int main(int argc, char** argv) { return salttex::cli::run(argc, argv, std::cout, std::cerr); }
