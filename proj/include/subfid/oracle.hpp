#pragma once

// Brute-force reference computations on full statevectors. Everything here
// is exponential in the chain length and guarded by kOracleCapacity.

#include <cstddef>
#include <cstdint>

#include "subfid/mps.hpp"
#include "subfid/tensor.hpp"
#include "subfid/ttn.hpp"

namespace subfid {

inline constexpr std::size_t kOracleCapacity = std::size_t{1} << 20;

// Amplitudes indexed row-major over (s_0, ..., s_{L-1}): site 0 is the most
// significant digit. MPS sites are contracted left to right, TTN layers
// bottom-up. The contraction is returned as is, so a canonical MPS or a valid
// TTN gives a unit vector and anything else shows its actual norm.
Tensor mps_to_statevector(const MatrixProductState& state);
Tensor ttn_to_statevector(const TreeTensorNetwork& ttn);

struct DensityMatrix {
  Tensor matrix;
  std::size_t x0 = 0;  // sites [x0, x1)
  std::size_t x1 = 0;
};

// Partial trace of |vec><vec| over everything outside [x0, x1).
DensityMatrix reduced_density_matrix(const Tensor& vec, std::size_t length,
                                     std::size_t x0, std::size_t x1);

// Tr sqrt(sqrt(rho) sigma sqrt(rho)).
double uhlmann_exact(const Tensor& rho, const Tensor& sigma);
double uhlmann_exact(const DensityMatrix& rho, const DensityMatrix& sigma);

// Both evaluation routes, for the internal cross-check.
struct UhlmannDetail {
  double via_eigenvalues = 0.0;  // Tr sqrt of sqrt(rho) sigma sqrt(rho)
  double via_trace_norm = 0.0;   // || sqrt(sigma) sqrt(rho) ||_tr
};
UhlmannDetail uhlmann_detail(const Tensor& rho, const Tensor& sigma);

enum class RestrictionMode { joint, disjoint };

struct RestrictedOptions {
  std::size_t restarts = 5;
  std::size_t max_iterations = 500;
  double tolerance = 1e-14;
  std::uint64_t seed = 0;
};

struct RestrictedResult {
  double value = 0.0;
  bool converged = true;
};

// max |<b| (U ⊗ 1_M) |a>| over unitaries U on the complement of [x0, x1):
// arbitrary U for joint mode, U_left ⊗ U_right for disjoint mode.
RestrictedResult restricted_fidelity(const Tensor& a, const Tensor& b,
                                     std::size_t length, std::size_t x0,
                                     std::size_t x1, RestrictionMode mode,
                                     const RestrictedOptions& options = {});

// x is n x chi_x with rho = x x^dagger; w is chi_x x chi_phi with
// w w^dagger = 1. Returns phi = x w, a purification of rho with the ancilla
// on the column index.
Tensor purify(const Tensor& x, const Tensor& w);

// Given a purification phi of x x^dagger, returns an isometry w with
// w w^dagger = 1 and x w = phi.
Tensor purification_decompose(const Tensor& phi, const Tensor& x);

// exp(-i H t) |psi> on the full statevector via the dense Hamiltonian.
Tensor exact_evolution(const Tensor& vec, const Matrix& hamiltonian, double t);

}  // namespace subfid
