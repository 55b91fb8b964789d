// Copyright 2026 The otloss Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "otloss/cli.hpp"

int main(int argc, char** argv) { return otloss::cli::run(argc, argv, std::cout, std::cerr); }
