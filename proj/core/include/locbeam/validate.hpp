// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace locbeam::validate {

struct Check {
  std::string name;
  bool passed = false;
  int instances = 0;
  // Largest observed error; for ordering checks, the most negative scaled eigenvalue, negated.
  double max_error = 0.0;
  double tolerance = 0.0;
  double runtime_s = 0.0;
  std::string detail;
};

struct Report {
  std::vector<Check> checks;
  bool passed() const;
};

enum class Suite { kOracles, kProperties, kAll };
Suite suite_from_string(const std::string& s);

// Closed-form flat TOA EFIM against the full-FIM Schur complement.
Check check_toa_oracle(int instances = 100, std::uint64_t seed = 11);
// Flat TDOA EFIM against the full FIM with clock prior, K_b in {0, 1, 1e3}.
Check check_tdoa_oracle(int instances = 100, std::uint64_t seed = 12);
// Pairwise-sum and difference forms of the TDOA EFIM.
Check check_tdoa_forms(int instances = 100, std::uint64_t seed = 13);
Check check_ofdm_oracle(int instances = 50, std::uint64_t seed = 14);
// Block size equal to the path count: both routes give a singular EFIM.
Check check_ofdm_singular(std::uint64_t seed = 15);
// Orderings use min eig(A - B) / max(1, ||A||) on normalized EFIMs.
Check check_toa_tdoa_ordering(int instances = 200, std::uint64_t seed = 16);
Check check_tdoa_bound_ordering(int instances = 200, std::uint64_t seed = 17);
// Sampled direction matrices inside the angle uncertainty set dominate the robust surrogates.
Check check_robust_dominance(int configurations = 50, int samples = 200, std::uint64_t seed = 18);
// tr(Jbar^-1) <= tr(Qbar^-1) whenever Qbar is positive definite, TOA and TDOA forms.
Check check_robust_crb(int configurations = 50, int samples = 200, std::uint64_t seed = 19);
// The first-order expansion of the interference log term upper-bounds it and is tight at the
// expansion point.
Check check_tangent_majorization(int instances = 100, std::uint64_t seed = 20);
// Outer objective non-increasing and every iterate truly feasible on small TOA scenarios.
Check check_mm_monotonic(int scenarios = 3, std::uint64_t seed = 21);

Report run(Suite suite);

}  // namespace locbeam::validate
