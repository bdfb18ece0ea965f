#include <iostream>

#include "ersearch_cli/cli.h"

int main(int argc, char **argv) { return ersearch::cli::Run(argc, argv, std::cout, std::cerr); }
