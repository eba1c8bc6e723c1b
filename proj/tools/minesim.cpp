#include <iostream>

#include "minesim/cli.hpp"

int main(int argc, char** argv) {
  return minesim::cli::run_cli(argc, argv, std::cout, std::cerr);
}
