// SPDX-License-Identifier: Apache-2.0
#include <iostream>
#include <string>
#include <vector>

#include "attndse/cli.hpp"

int main(int argc, char** argv) {
  return adse::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
