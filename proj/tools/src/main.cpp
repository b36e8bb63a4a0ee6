#include "enclosure_cli/commands.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return enclosure::cli::run(argc, argv, std::cout, std::cerr);
}
