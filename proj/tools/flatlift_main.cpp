// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "flatlift/cli/cli.hpp"

int main(int argc, char** argv) {
  return flatlift::cli::cli_dispatch({argv, argv + argc}, {std::cout, std::cerr});
}
