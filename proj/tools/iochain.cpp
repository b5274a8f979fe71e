#include <iostream>

#include "iochain/cli.hpp"

int main(int argc, char** argv) {
  return iochain::cli::run(argc, argv, std::cout, std::cerr);
}
