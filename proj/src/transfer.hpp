#pragma once

// Site-matrix kernels shared by the MPS, fidelity and oracle code.
//
// A site matrix holds an MPS tensor with axes (left, phys, right) as a
// (left * d) x right matrix whose row index is left * d + phys.

#include <cstddef>

#include "subfid/tensor.hpp"

namespace subfid::detail {

using StridedMap =
    Eigen::Map<const Matrix, 0, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>>;

// Rows of `site` with physical index sigma: a (left x right) strided view.
inline StridedMap phys_slice(const Matrix& site, std::size_t sigma,
                             std::size_t d) {
  const Eigen::Index di = static_cast<Eigen::Index>(d);
  return StridedMap(site.data() + sigma, site.rows() / di, site.cols(),
                    Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>(site.rows(),
                                                                  di));
}

// sum_sigma bra[sigma]^dagger env ket[sigma]; env is (bra left) x (ket left).
inline Matrix mixed_left(const Matrix& env, const Matrix& bra,
                         const Matrix& ket, std::size_t d) {
  Matrix out = Matrix::Zero(bra.cols(), ket.cols());
  for (std::size_t s = 0; s < d; ++s) {
    const Matrix tmp = env * phys_slice(ket, s, d);
    out.noalias() += phys_slice(bra, s, d).adjoint() * tmp;
  }
  return out;
}

// sum_sigma conj(bra[sigma]) env ket[sigma]^T; env is (bra right) x (ket right).
inline Matrix mixed_right(const Matrix& env, const Matrix& bra,
                          const Matrix& ket, std::size_t d) {
  Matrix out = Matrix::Zero(bra.rows() / static_cast<Eigen::Index>(d),
                            ket.rows() / static_cast<Eigen::Index>(d));
  for (std::size_t s = 0; s < d; ++s) {
    const Matrix tmp = phys_slice(bra, s, d).conjugate() * env;
    out.noalias() += tmp * phys_slice(ket, s, d).transpose();
  }
  return out;
}

// Reinterprets a (rows x cols) matrix, read row-major, as new_rows x
// (rows * cols / new_rows), again row-major.
inline Matrix regroup(const Matrix& m, Eigen::Index new_rows) {
  const RowMatrix rm = m;
  return Eigen::Map<const RowMatrix>(rm.data(), new_rows,
                                     m.size() / new_rows);
}

// Row-major tensor data -> site matrix.
inline Matrix site_matrix(const Tensor& t) {
  return t.row_view(t.extent(0) * t.extent(1), t.extent(2));
}

}  // namespace subfid::detail
