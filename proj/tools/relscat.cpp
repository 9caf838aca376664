#include <iostream>

#include "relscat/cli.hpp"

int main(int argc, char** argv) { return relscat::cli::run(argc, argv, std::cout, std::cerr); }
