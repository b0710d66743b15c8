//===-- predicator.cpp - If-conversion autotuner CLI ----------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "predicator/Driver.h"

#include <iostream>

int main(int argc, char **argv) {
  std::vector<std::string> Args(argv + 1, argv + argc);
  return predicator::runCommand(Args, std::cout, std::cerr);
}
