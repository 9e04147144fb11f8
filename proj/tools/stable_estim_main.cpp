#include <iostream>

#include "stable_estim/cli.hpp"

int main(int argc, char** argv) {
  return stable_estim::cli::run(argc, argv, std::cout, std::cerr);
}
