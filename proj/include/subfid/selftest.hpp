#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace subfid {

// Outcome of a randomized property suite. `worst_error` and
// `worst_tolerance` belong to the check that came closest to (or furthest
// past) its tolerance.
struct SuiteResult {
  std::string name;
  std::size_t trials = 0;
  std::size_t checks = 0;
  std::size_t failures = 0;
  double worst_error = 0.0;
  double worst_tolerance = 0.0;
  double seconds = 0.0;

  bool passed() const { return failures == 0; }
};

// Purification of (x, w) reproduces x x^dagger: tolerance 1e-12.
SuiteResult purify_suite(std::size_t trials, std::uint64_t seed);
// purification_decompose recovers an isometry w with x w = phi: 1e-9.
SuiteResult decompose_suite(std::size_t trials, std::uint64_t seed);
// The optimal isometry attains the trace norm (1e-12) and beats random
// isometries.
SuiteResult maximality_suite(std::size_t trials, std::uint64_t seed);
// Range, symmetry, identity, unitary invariance and the pure-state formula
// for the exact Uhlmann fidelity of density matrices.
SuiteResult uhlmann_suite(std::size_t trials, std::uint64_t seed);
// Range, symmetry, identity, nested-region monotonicity, F_d <= F and
// local-unitary invariance for the half-system, window, disjoint and tree
// branch fidelities.
SuiteResult network_invariant_suite(std::size_t instances, std::uint64_t seed);

std::vector<SuiteResult> run_selftest(std::size_t trials, std::uint64_t seed);

}  // namespace subfid
