#include <iostream>

#include "calr_lab/runner.hpp"

int main(int argc, char** argv) { return calr_lab::run_cli(argc, argv, std::cout, std::cerr); }
