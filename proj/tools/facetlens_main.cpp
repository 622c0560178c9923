// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "facetlens/app/cli.hpp"

int main(int argc, char** argv) { return facetlens::app::runCli(argc, argv, std::cout, std::cerr); }
