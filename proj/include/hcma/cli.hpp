#pragma once

// Command-line driver. The executable in tools/ only forwards to run().
//
//   hcma_cli [--scenario PATH] [--out DIR] [--threads N] [--seed N] [--strict] <command> ...
//
// Commands: solve, diagnose, reconstruct (scenario driven), counterexample,
// linear, hilbert (flag driven). Exit codes: 0 all enabled checks pass,
// 2 parse error, 3 solver failure, 4 check failure.

#include <iosfwd>
#include <string>

#include "hcma/rh_linear.hpp"

namespace hcma::cli {

enum ExitCode : int { kOk = 0, kParseError = 2, kSolverError = 3, kCheckFailure = 4 };

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Single-node linear problem with A = 1, B = 0 and tau-dependent coefficients
/// A~ = 1 + delta cos(theta), B~ = delta exp(-2i theta); data
/// conj(tau) + 0.3 tau^2 + 0.1. delta is the sup distance of (A~, B~) to (A, B).
struct LinearProbe {
  BoundaryCoeffField a_tilde;
  BoundaryCoeffField b_tilde;
  HermitianField a;
  SymmetricField b;
  BoundaryData data;
};

LinearProbe make_linear_probe(double delta, int circle_size = 128);

}  // namespace hcma::cli
