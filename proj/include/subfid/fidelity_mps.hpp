#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "subfid/mps.hpp"

namespace subfid {

enum class FidelityMethod { half_system, window_uhlmann, window_disjoint, ttn_branch };

std::string to_string(FidelityMethod method);

struct FidelityReport {
  double value = 0.0;
  // Descending singular values of the core matrix whose trace norm is the
  // value (trace-norm methods only; for the disjoint method, the spectrum of
  // the final isometry update).
  std::vector<double> singular_spectrum;
  FidelityMethod method = FidelityMethod::half_system;
  std::size_t iterations = 0;
  bool converged = true;
  std::size_t restarts_used = 0;
};

enum class Side { left, right };

// Sites [0, cut) for Side::left, [cut, L) for Side::right; 0 < cut < L.
FidelityReport half_system_fidelity(const MatrixProductState& a,
                                    const MatrixProductState& b,
                                    std::size_t cut, Side side);

// Half-system fidelity at every cut 1 .. L-1 in one environment sweep;
// entry i belongs to cut i + 1.
std::vector<FidelityReport> half_system_profile(const MatrixProductState& a,
                                                const MatrixProductState& b,
                                                Side side);

// How the window core matrix is contracted. `physical` builds the window
// wavefunctions on the d^w physical indices and is cheap for short windows;
// `transfer` absorbs sites into the four-leg transfer object, O(chi^5) per
// site plus an O(chi^6) trace norm. Both give the same value.
enum class WindowContraction { automatic, physical, transfer };

// Window [x0, x1), 0 <= x0 < x1 <= L.
FidelityReport window_fidelity(
    const MatrixProductState& a, const MatrixProductState& b, std::size_t x0,
    std::size_t x1,
    WindowContraction contraction = WindowContraction::automatic);

struct DisjointOptions {
  std::size_t max_iterations = 200;
  double tolerance = 1e-12;
  // First start is the truncated identity, the rest are seeded random
  // isometries.
  std::size_t restarts = 3;
  std::uint64_t seed = 0;
};

FidelityReport disjoint_window_fidelity(const MatrixProductState& a,
                                        const MatrixProductState& b,
                                        std::size_t x0, std::size_t x1,
                                        const DisjointOptions& options = {});

struct WindowProfileRow {
  std::size_t x0 = 0;
  std::size_t x1 = 0;
  FidelityReport uhlmann;
  FidelityReport disjoint;  // only filled when requested
};

// Nested windows of width 1 .. max_width grown around `center`: width w
// covers [center - w/2, center - w/2 + w). The transfer object is extended
// one site at a time instead of being rebuilt per width.
std::vector<WindowProfileRow> centered_window_profile(
    const MatrixProductState& a, const MatrixProductState& b,
    std::size_t center, std::size_t max_width, bool with_disjoint,
    const DisjointOptions& options = {});

}  // namespace subfid
