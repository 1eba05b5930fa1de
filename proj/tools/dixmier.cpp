#include <iostream>

#include "dixmier/cli.hpp"

int main(int argc, char** argv) {
  return dixmier::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
