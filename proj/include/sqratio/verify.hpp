// Copyright 2026 The sqratio Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SQRATIO_VERIFY_HPP_
#define SQRATIO_VERIFY_HPP_

#include <string>
#include <vector>

// Built-in property checks: prox against an independent brute-force
// minimizer, gradients against finite differences, descent and
// criticality of small end-to-end solves, subgradient validity, and
// generator determinism. Deterministic and fast; used by the `verify`
// CLI subcommand.

namespace sqratio {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

std::vector<CheckResult> run_self_checks();

/// One "PASS name detail" / "FAIL name detail" line per check.
std::string format_verdict_table(const std::vector<CheckResult>& results);

}  // namespace sqratio

#endif  // SQRATIO_VERIFY_HPP_
