#include <iostream>

#include "qrtan/cli.hpp"

int main(int argc, char** argv) { return qrtan::cli_main(argc, argv, std::cout, std::cerr); }
