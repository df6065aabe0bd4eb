#include <iostream>

#include "dacurv/cli.hpp"

int main(int argc, char** argv) { return dacurv::cli::main_entry(argc, argv, std::cout, std::cerr); }
