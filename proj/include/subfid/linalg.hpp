#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "subfid/tensor.hpp"

namespace subfid {

// Bond truncation rule. Trailing singular values are discarded while the
// squared sum of the discarded ones stays within weight_cutoff; the kept
// rank never exceeds max_rank and never drops below 1.
struct TruncationSpec {
  std::optional<std::size_t> max_rank;
  double weight_cutoff = 0.0;

  static TruncationSpec unbounded() { return {}; }
  static TruncationSpec rank(std::size_t r, double cutoff = 0.0) {
    return {r, cutoff};
  }
};

// m = u * diag(s) * v^dagger, with u and v isometric.
struct SvdResult {
  Tensor u;
  std::vector<double> s;
  Tensor v;
  double discarded_weight = 0.0;
};

struct EigenResult {
  std::vector<double> values;  // descending
  Tensor vectors;              // columns are eigenvectors
};

struct IsometryResult {
  Tensor w;
  double value = 0.0;
};

SvdResult svd_truncate(const Tensor& m, const TruncationSpec& spec);
double trace_norm(const Tensor& m);
EigenResult hermitian_decompose(const Tensor& m);
Tensor psd_factor(const Tensor& m);
IsometryResult optimal_isometry(const Tensor& m);

// Relative clip applied to negative eigenvalues of PSD inputs.
inline constexpr double kPsdClip = 1e-12;

// Matrix-level kernels used by the tensor-network code. They follow the
// same conventions as the Tensor entry points above.
namespace linalg {

struct Svd {
  Matrix u;
  RealVector s;  // descending
  Matrix v;
  double discarded_weight = 0.0;
};

// Full thin SVD, singular values descending.
Svd svd(const Matrix& m);
// Keeps a prefix of the spectrum according to spec.
std::size_t truncation_rank(const RealVector& s, const TruncationSpec& spec);
Svd svd_truncate(const Matrix& m, const TruncationSpec& spec);

RealVector singular_values(const Matrix& m);
double trace_norm(const Matrix& m);

struct Eig {
  RealVector values;  // descending
  Matrix vectors;
};
Eig hermitian_eig(const Matrix& m);

// C with C C^dagger = m. The width is the numerical rank: eigenvalues at or
// below kPsdClip * lambda_max count as zero.
Matrix psd_factor(const Matrix& m);
// Principal square root of a PSD matrix, with the same numerical-rank cut
// as psd_factor.
Matrix psd_sqrt(const Matrix& m);

// w = V U^dagger for m = U S V^dagger, so |Tr(w m)| is the trace norm.
struct Isometry {
  Matrix w;
  double value = 0.0;
  RealVector spectrum;
};
Isometry optimal_isometry(const Matrix& m);

// Nearest isometry (polar factor) of a rectangular matrix.
Matrix polar_isometry(const Matrix& m);

// Residual of w w^dagger = 1 (rows <= cols) or w^dagger w = 1 otherwise.
double isometry_residual(const Matrix& w);

Matrix random_gaussian(std::size_t rows, std::size_t cols, std::mt19937_64& rng);
// rows x cols isometry, isometric on the smaller dimension.
Matrix random_isometry(std::size_t rows, std::size_t cols, std::mt19937_64& rng);
Matrix random_unitary(std::size_t n, std::mt19937_64& rng);

// exp(factor * h) for Hermitian h.
Matrix hermitian_exp(const Matrix& h, cplx factor);

}  // namespace linalg
}  // namespace subfid
