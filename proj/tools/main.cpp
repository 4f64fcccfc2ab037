#include <iostream>

#include "diafuse/cli.hpp"

int main(int argc, char** argv) {
  return diafuse::run_cli(argc, argv, std::cout, std::cerr);
}
