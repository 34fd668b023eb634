// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "ness/commands.hpp"

int main(int argc, char** argv) { return ness::run_cli(argc, argv, std::cout, std::cerr); }
