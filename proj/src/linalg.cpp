#include "subfid/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "subfid/errors.hpp"

namespace subfid {
namespace linalg {

namespace {

void require_finite(const Matrix& m, const char* where) {
  if (!m.allFinite()) {
    throw NumericError(std::string(where) + ": non-finite input");
  }
}

}  // namespace

Svd svd(const Matrix& m) {
  require_finite(m, "svd");
  Svd out;
  if (m.size() == 0) {
    out.u = Matrix(m.rows(), 0);
    out.v = Matrix(m.cols(), 0);
    return out;
  }
  Eigen::BDCSVD<Matrix> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success) {
    throw NumericError("svd: decomposition did not converge");
  }
  out.u = dec.matrixU();
  out.s = dec.singularValues();
  out.v = dec.matrixV();
  if (!out.u.allFinite() || !out.v.allFinite() || !out.s.allFinite()) {
    throw NumericError("svd: non-finite factors");
  }
  return out;
}

std::size_t truncation_rank(const RealVector& s, const TruncationSpec& spec) {
  std::size_t k = static_cast<std::size_t>(s.size());
  if (spec.max_rank) k = std::min(k, *spec.max_rank);
  if (spec.weight_cutoff > 0.0) {
    double dropped = 0.0;
    for (std::size_t i = k; i < static_cast<std::size_t>(s.size()); ++i) {
      dropped += s[i] * s[i];
    }
    while (k > 1) {
      const double next = dropped + s[k - 1] * s[k - 1];
      if (next > spec.weight_cutoff) break;
      dropped = next;
      --k;
    }
  }
  return std::max<std::size_t>(k, s.size() > 0 ? 1 : 0);
}

Svd svd_truncate(const Matrix& m, const TruncationSpec& spec) {
  if (spec.max_rank && *spec.max_rank == 0) {
    throw ArgumentError("svd_truncate: max_rank must be positive");
  }
  if (spec.weight_cutoff < 0.0) {
    throw ArgumentError("svd_truncate: weight_cutoff must be non-negative");
  }
  Svd full = svd(m);
  const std::size_t k = truncation_rank(full.s, spec);
  double dropped = 0.0;
  for (Eigen::Index i = k; i < full.s.size(); ++i) {
    dropped += full.s[i] * full.s[i];
  }
  Svd out;
  out.u = full.u.leftCols(k);
  out.s = full.s.head(k);
  out.v = full.v.leftCols(k);
  out.discarded_weight = dropped;
  return out;
}

RealVector singular_values(const Matrix& m) {
  require_finite(m, "singular_values");
  if (m.size() == 0) return RealVector(0);
  Eigen::BDCSVD<Matrix> dec(m);
  if (dec.info() != Eigen::Success) {
    throw NumericError("singular_values: decomposition did not converge");
  }
  return dec.singularValues();
}

double trace_norm(const Matrix& m) { return singular_values(m).sum(); }

Eig hermitian_eig(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw ArgumentError("hermitian_eig: matrix must be square");
  }
  require_finite(m, "hermitian_eig");
  const double scale = max_abs(m);
  if (max_abs(m - m.adjoint()) > 1e-10 * std::max(scale, 1e-300)) {
    throw ArgumentError("hermitian_eig: matrix is not Hermitian");
  }
  Eig out;
  if (m.size() == 0) return out;
  const Matrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> dec(sym);
  if (dec.info() != Eigen::Success) {
    throw NumericError("hermitian_eig: decomposition did not converge");
  }
  // Eigen returns ascending order.
  out.values = dec.eigenvalues().reverse();
  out.vectors = dec.eigenvectors().rowwise().reverse();
  return out;
}

namespace {

// Clips roundoff negatives; throws if the spectrum is genuinely indefinite.
RealVector clipped_spectrum(const RealVector& values, const char* where) {
  RealVector out = values;
  if (out.size() == 0) return out;
  const double lmax = std::max(out.maxCoeff(), 0.0);
  const double floor = -kPsdClip * lmax;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (out[i] < floor) {
      throw NotPsdError(std::string(where) + ": eigenvalue " +
                        std::to_string(out[i]) + " below clip threshold");
    }
    if (out[i] < 0.0) out[i] = 0.0;
  }
  return out;
}

}  // namespace

Matrix psd_factor(const Matrix& m) {
  const Eig eig = hermitian_eig(m);
  const RealVector lam = clipped_spectrum(eig.values, "psd_factor");
  const double cut = lam.size() > 0 ? kPsdClip * lam[0] : 0.0;
  Eigen::Index width = 0;
  while (width < lam.size() && lam[width] > cut) ++width;
  Matrix c = eig.vectors.leftCols(width);
  for (Eigen::Index j = 0; j < width; ++j) c.col(j) *= std::sqrt(lam[j]);
  return c;
}

Matrix psd_sqrt(const Matrix& m) {
  const Eig eig = hermitian_eig(m);
  RealVector lam = clipped_spectrum(eig.values, "psd_sqrt");
  const double cut = lam.size() > 0 ? kPsdClip * lam[0] : 0.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam[i] <= cut) lam[i] = 0.0;
  }
  return eig.vectors * lam.cwiseSqrt().asDiagonal() * eig.vectors.adjoint();
}

Isometry optimal_isometry(const Matrix& m) {
  const Svd dec = svd(m);
  Isometry out;
  out.w = dec.v * dec.u.adjoint();
  out.spectrum = dec.s;
  out.value = dec.s.sum();
  return out;
}

Matrix polar_isometry(const Matrix& m) {
  const Svd dec = svd(m);
  return dec.u * dec.v.adjoint();
}

double isometry_residual(const Matrix& w) {
  if (w.rows() <= w.cols()) {
    return max_abs(w * w.adjoint() -
                   Matrix::Identity(w.rows(), w.rows()));
  }
  return max_abs(w.adjoint() * w - Matrix::Identity(w.cols(), w.cols()));
}

Matrix random_gaussian(std::size_t rows, std::size_t cols,
                       std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(rows, cols);
  // Fill row by row so the draw order matches row-major tensor storage.
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      m(i, j) = cplx(re, im);
    }
  }
  return m;
}

Matrix random_isometry(std::size_t rows, std::size_t cols,
                       std::mt19937_64& rng) {
  return polar_isometry(random_gaussian(rows, cols, rng));
}

Matrix random_unitary(std::size_t n, std::mt19937_64& rng) {
  return random_isometry(n, n, rng);
}

Matrix hermitian_exp(const Matrix& h, cplx factor) {
  const Eig eig = hermitian_eig(h);
  Vector phases(eig.values.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) {
    phases[i] = std::exp(factor * eig.values[i]);
  }
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

}  // namespace linalg

namespace {

Matrix rank2(const Tensor& m, const char* where) {
  if (m.rank() != 2) {
    throw ArgumentError(std::string(where) + ": expected a rank-2 tensor");
  }
  return m.matrix();
}

}  // namespace

SvdResult svd_truncate(const Tensor& m, const TruncationSpec& spec) {
  const linalg::Svd dec = linalg::svd_truncate(rank2(m, "svd_truncate"), spec);
  SvdResult out;
  out.u = Tensor::from_matrix(dec.u);
  out.v = Tensor::from_matrix(dec.v);
  out.s.assign(dec.s.data(), dec.s.data() + dec.s.size());
  out.discarded_weight = dec.discarded_weight;
  return out;
}

double trace_norm(const Tensor& m) {
  return linalg::trace_norm(rank2(m, "trace_norm"));
}

EigenResult hermitian_decompose(const Tensor& m) {
  const linalg::Eig eig =
      linalg::hermitian_eig(rank2(m, "hermitian_decompose"));
  EigenResult out;
  out.values.assign(eig.values.data(), eig.values.data() + eig.values.size());
  out.vectors = Tensor::from_matrix(eig.vectors);
  return out;
}

Tensor psd_factor(const Tensor& m) {
  const Matrix c = linalg::psd_factor(rank2(m, "psd_factor"));
  // Extents must be positive, so the zero-width factor of the zero matrix
  // comes back as the empty default tensor.
  if (c.cols() == 0) return Tensor();
  return Tensor::from_matrix(c);
}

IsometryResult optimal_isometry(const Tensor& m) {
  const linalg::Isometry iso =
      linalg::optimal_isometry(rank2(m, "optimal_isometry"));
  return {Tensor::from_matrix(iso.w), iso.value};
}

}  // namespace subfid
