#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "subfid/linalg.hpp"
#include "subfid/tensor.hpp"

namespace subfid {

// Finite open-boundary MPS in Vidal form:
//
//   |psi> = Gamma[0] S[1] Gamma[1] S[2] ... S[L-1] Gamma[L-1]
//
// Gamma[n] has axes (left bond, physical, right bond). S[n] holds the
// Schmidt values on bond n, bonds numbered 0..L with S[0] = S[L] = (1).
// When canonical, S[n] are the Schmidt coefficients of the cut between
// sites n-1 and n, and both orthogonality conditions hold.
class MatrixProductState {
 public:
  MatrixProductState(std::vector<Tensor> gammas,
                     std::vector<std::vector<double>> schmidt,
                     bool canonical);

  // Plain site tensors M[n] (left, phys, right); all interior Schmidt
  // vectors are set to ones, so the state is M[0] M[1] ... M[L-1].
  static MatrixProductState from_site_tensors(std::vector<Tensor> sites);

  std::size_t length() const { return gammas_.size(); }
  std::size_t phys_dim() const { return phys_dim_; }
  std::size_t bond_dim(std::size_t bond) const;
  std::vector<std::size_t> bond_dims() const;
  std::size_t max_bond_dim() const;
  bool is_canonical() const { return canonical_; }

  const Tensor& gamma(std::size_t site) const;
  const std::vector<double>& schmidt(std::size_t bond) const;

  // Right-canonical site matrix Gamma[n] S[n+1], rows (left, phys).
  Matrix right_site(std::size_t site) const;
  // Left-canonical site matrix S[n] Gamma[n], rows (left, phys).
  Matrix left_site(std::size_t site) const;

  // Two-site gate on (site, site+1) as a (d*d) x (d*d) matrix, followed by an
  // SVD split. Requires the right-canonical structure to the right of `site`
  // and Schmidt values on bond `site`. Returns the discarded weight relative
  // to the norm. Clears the canonical flag when the gate is not unitary or
  // weight was actually discarded.
  double apply_gate(const Matrix& gate, std::size_t site,
                    const TruncationSpec& truncation);
  // Single-site operator. Unitary operators keep the canonical flag.
  void apply_local(const Matrix& op, std::size_t site);
  // Left-to-right QR sweep followed by a right-to-left SVD sweep.
  void canonicalize_in_place();

  friend bool operator==(const MatrixProductState&,
                         const MatrixProductState&) = default;

 private:
  void validate() const;

  std::vector<Tensor> gammas_;
  std::vector<std::vector<double>> schmidt_;
  std::size_t phys_dim_ = 0;
  bool canonical_ = false;
};

// Schmidt values below this fraction of the largest one are dropped when
// re-establishing the canonical form.
inline constexpr double kSchmidtFloor = 1e-14;

MatrixProductState random_mps(std::size_t length, std::size_t phys_dim,
                              std::size_t chi, std::uint64_t seed);

// Product state from one (not necessarily normalized) vector per site.
MatrixProductState product_mps(const std::vector<Vector>& site_vectors);

MatrixProductState canonicalize(MatrixProductState state);

// Max-abs residual of both orthogonality conditions over all sites.
double canonical_residual(const MatrixProductState& state);

// <a|b>.
cplx overlap(const MatrixProductState& a, const MatrixProductState& b);

cplx expect_local(const MatrixProductState& state, const Tensor& op,
                  std::size_t site);
// Two-site operator on (site, site+1), axes (out1, out2, in1, in2).
cplx expect_two_site(const MatrixProductState& state, const Tensor& op,
                     std::size_t site);

struct GateResult {
  MatrixProductState state;
  double discarded_weight = 0.0;
};

// Gate axes (out1, out2, in1, in2). The returned state is canonical: when the
// split was not exact the whole chain is re-canonicalized.
GateResult apply_two_site_gate(MatrixProductState state, const Tensor& gate,
                               std::size_t site,
                               const TruncationSpec& truncation);

// Returns 0 for a product state and +infinity when the transfer spectrum is
// degenerate in magnitude.
double correlation_length(const MatrixProductState& state);

}  // namespace subfid
