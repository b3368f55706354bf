#pragma once

// Helpers shared by the unit and acceptance tests.

#include <complex>
#include <random>

#include "subfid/linalg.hpp"
#include "subfid/mps.hpp"
#include "subfid/oracle.hpp"

namespace subfid::test {

// max |a - e^{i phi} b| with the phase chosen to align the largest overlap.
inline double phase_distance(const Vector& a, const Vector& b) {
  const cplx ov = b.dot(a);
  const cplx phase = std::abs(ov) > 0.0 ? ov / std::abs(ov) : cplx(1.0);
  return (a - phase * b).cwiseAbs().maxCoeff();
}

inline Vector unit(const Vector& v) { return v / v.norm(); }

inline Vector statevector(const MatrixProductState& s) {
  return mps_to_statevector(s).vector();
}

// Non-canonical chain of Gaussian site tensors.
inline MatrixProductState gaussian_chain(std::size_t length, std::size_t chi,
                                         std::mt19937_64& rng) {
  std::vector<Tensor> sites;
  for (std::size_t n = 0; n < length; ++n) {
    const std::size_t cl = n == 0 ? 1 : chi;
    const std::size_t cr = n + 1 == length ? 1 : chi;
    sites.push_back(Tensor::from_matrix(linalg::random_gaussian(cl * 2, cr, rng),
                                        {cl, 2, cr}));
  }
  return MatrixProductState::from_site_tensors(std::move(sites));
}

inline Tensor op2(const Matrix& m) { return Tensor::from_matrix(m); }

inline Tensor op4(const Matrix& m, std::size_t d = 2) {
  return Tensor::from_matrix(m, {d, d, d, d});
}

}  // namespace subfid::test
