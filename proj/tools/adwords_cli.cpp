#include <iostream>

#include "adwords/cli.hpp"

int main(int argc, char** argv) {
  return adwords::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
