// Copyright 2026 The otloss Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

namespace otloss::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,  // numerical or other runtime failure
  kParse = 2,    // unreadable/malformed input, bad flags or config
  kSchema = 3,   // well-formed input violating the record schema
  kShape = 4,    // tensor shape, span or token-id mismatch
  kCheck = 5,    // gradient check threshold breach
};

/// Subcommands: score, loss, gradcheck, train-toy.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace otloss::cli
