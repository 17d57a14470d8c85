#include "run.hpp"

#include <iostream>

int main(int argc, char** argv) { return effeq::cli::main_entry(argc, argv, std::cout, std::cerr); }
