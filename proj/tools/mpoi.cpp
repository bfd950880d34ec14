#include <iostream>

#include "mpoi/cli/commands.hpp"

int main(int argc, char** argv) { return mpoi::cli::run(argc, argv, std::cout, std::cerr); }
