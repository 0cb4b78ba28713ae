#include <iostream>

#include "boolrr/app.hpp"

int main(int argc, char** argv) { return boolrr::cli_main(argc, argv, std::cout, std::cerr); }
