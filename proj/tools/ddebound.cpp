#include <iostream>

#include "ddebound/cli.hpp"

int main(int argc, char** argv) { return ddebound::run_cli(argc, argv, std::cout, std::cerr); }
