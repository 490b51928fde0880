#pragma once
// Self-verification suites backing `nessxy verify`: each check re-derives one
// contract of the library and reports the measured figure against its bound.

#include <string>
#include <vector>

namespace nessxy::checks {

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;      // measured figure of merit
  double threshold = 0.0;  // acceptance level for `value`
  std::string detail;
  double seconds = 0.0;
};

// Cheap invariants: algebraic identities, quadrature cross-checks, bounds.
// Completes in well under a minute.
std::vector<CheckResult> fast_suite(unsigned long long seed, int threads);

// Dense-diagonalization cross-validation at reference resolution.  Dominated
// by the largest eigensolves; minutes, not hours.
std::vector<CheckResult> oracle_suite();

}  // namespace nessxy::checks
