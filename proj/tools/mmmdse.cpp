#include "mmmdse/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return mmmdse::cli::run(argc, argv, std::cout, std::cerr); }
