#include "pwlstab/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return pwlstab::cli::dispatch(argc, argv, std::cout, std::cerr);
}
