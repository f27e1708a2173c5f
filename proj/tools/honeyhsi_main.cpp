#include <iostream>

#include "honeyhsi/cli.hpp"

int main(int argc, char** argv) { return honeyhsi::cli::run(argc, argv, std::cout, std::cerr); }
