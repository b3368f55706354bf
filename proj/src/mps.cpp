#include "subfid/mps.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "subfid/errors.hpp"
#include "transfer.hpp"

namespace subfid {

using detail::phys_slice;
using detail::regroup;
using detail::site_matrix;

namespace {

Tensor site_tensor(const Matrix& m, std::size_t left, std::size_t d,
                   std::size_t right) {
  return Tensor::from_matrix(m, {left, d, right});
}

bool is_unitary(const Matrix& m) {
  return m.rows() == m.cols() &&
         max_abs(m.adjoint() * m - Matrix::Identity(m.rows(), m.cols())) <
             1e-12;
}

// Relative discarded weight below which a split counts as exact.
constexpr double kExactTruncation = 1e-20;

// Drops trailing values below kSchmidtFloor relative to the largest.
Eigen::Index significant_rank(const RealVector& s) {
  if (s.size() == 0 || !(s[0] > 0.0)) return 0;
  Eigen::Index k = s.size();
  while (k > 1 && s[k - 1] < kSchmidtFloor * s[0]) --k;
  return k;
}

}  // namespace

MatrixProductState::MatrixProductState(
    std::vector<Tensor> gammas, std::vector<std::vector<double>> schmidt,
    bool canonical)
    : gammas_(std::move(gammas)),
      schmidt_(std::move(schmidt)),
      canonical_(canonical) {
  if (!gammas_.empty() && gammas_[0].rank() == 3) {
    phys_dim_ = gammas_[0].extent(1);
  }
  validate();
}

void MatrixProductState::validate() const {
  if (gammas_.empty()) throw ArgumentError("MPS: length must be positive");
  if (schmidt_.size() != gammas_.size() + 1) {
    throw ArgumentError("MPS: need length + 1 Schmidt vectors");
  }
  const std::size_t d = phys_dim_;
  for (std::size_t n = 0; n < gammas_.size(); ++n) {
    const Tensor& g = gammas_[n];
    if (g.rank() != 3) throw ArgumentError("MPS: site tensors must be rank 3");
    if (g.extent(1) != d) throw ArgumentError("MPS: inconsistent phys_dim");
    if (g.extent(0) != schmidt_[n].size() ||
        g.extent(2) != schmidt_[n + 1].size()) {
      throw DimensionError("MPS: bond extent mismatch at site " +
                           std::to_string(n));
    }
  }
  if (schmidt_.front().size() != 1 || schmidt_.back().size() != 1) {
    throw DimensionError("MPS: boundary bonds must have extent 1");
  }
  for (const auto& s : schmidt_) {
    for (double x : s) {
      if (!(x >= 0.0) || !std::isfinite(x)) {
        throw ArgumentError("MPS: Schmidt values must be finite and >= 0");
      }
    }
  }
}

MatrixProductState MatrixProductState::from_site_tensors(
    std::vector<Tensor> sites) {
  if (sites.empty()) throw ArgumentError("MPS: length must be positive");
  std::vector<std::vector<double>> schmidt;
  schmidt.reserve(sites.size() + 1);
  for (const auto& t : sites) {
    if (t.rank() != 3) throw ArgumentError("MPS: site tensors must be rank 3");
    schmidt.emplace_back(t.extent(0), 1.0);
  }
  schmidt.emplace_back(sites.back().extent(2), 1.0);
  return MatrixProductState(std::move(sites), std::move(schmidt), false);
}

std::size_t MatrixProductState::bond_dim(std::size_t bond) const {
  if (bond > length()) throw ArgumentError("MPS: bond out of range");
  return schmidt_[bond].size();
}

std::vector<std::size_t> MatrixProductState::bond_dims() const {
  std::vector<std::size_t> dims;
  for (const auto& s : schmidt_) dims.push_back(s.size());
  return dims;
}

std::size_t MatrixProductState::max_bond_dim() const {
  std::size_t m = 0;
  for (const auto& s : schmidt_) m = std::max(m, s.size());
  return m;
}

const Tensor& MatrixProductState::gamma(std::size_t site) const {
  if (site >= length()) throw ArgumentError("MPS: site out of range");
  return gammas_[site];
}

const std::vector<double>& MatrixProductState::schmidt(std::size_t bond) const {
  if (bond > length()) throw ArgumentError("MPS: bond out of range");
  return schmidt_[bond];
}

Matrix MatrixProductState::right_site(std::size_t site) const {
  Matrix m = site_matrix(gamma(site));
  const auto& s = schmidt_[site + 1];
  for (Eigen::Index j = 0; j < m.cols(); ++j) m.col(j) *= s[j];
  return m;
}

Matrix MatrixProductState::left_site(std::size_t site) const {
  Matrix m = site_matrix(gamma(site));
  const auto& s = schmidt_[site];
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    m.row(r) *= s[r / static_cast<Eigen::Index>(phys_dim_)];
  }
  return m;
}

double MatrixProductState::apply_gate(const Matrix& gate, std::size_t site,
                                      const TruncationSpec& truncation) {
  const std::size_t d = phys_dim_;
  if (site + 1 >= length()) throw ArgumentError("apply_gate: site out of range");
  if (gate.rows() != static_cast<Eigen::Index>(d * d) ||
      gate.cols() != static_cast<Eigen::Index>(d * d)) {
    throw DimensionError("apply_gate: gate must be (d*d) x (d*d)");
  }
  const std::size_t cl = bond_dim(site);
  const std::size_t cr = bond_dim(site + 2);

  // theta = B[n] B[n+1], rows (alpha, s1), cols (s2, beta).
  const Matrix b0 = right_site(site);
  const Matrix b1 = regroup(right_site(site + 1), b0.cols());
  RowMatrix theta = b0 * b1;
  // Apply the gate block by block: for fixed alpha the (s1, s2, beta) data is
  // contiguous in row-major order.
  for (std::size_t a = 0; a < cl; ++a) {
    Eigen::Map<RowMatrix> block(theta.data() + a * d * d * cr, d * d, cr);
    const RowMatrix updated = gate * block;
    block = updated;
  }
  const Matrix theta_g = theta;  // (alpha s1) x (s2 beta)

  Matrix weighted = theta_g;
  const auto& sl = schmidt_[site];
  for (Eigen::Index r = 0; r < weighted.rows(); ++r) {
    weighted.row(r) *= sl[r / static_cast<Eigen::Index>(d)];
  }
  linalg::Svd dec = linalg::svd(weighted);
  const double total = dec.s.squaredNorm();
  if (!(total > 0.0)) {
    throw DegenerateStateError("apply_gate: gate annihilated the state");
  }
  Eigen::Index k = static_cast<Eigen::Index>(
      linalg::truncation_rank(dec.s / std::sqrt(total), truncation));
  k = std::min(k, significant_rank(dec.s));
  if (k == 0) throw DegenerateStateError("apply_gate: truncated to rank 0");
  const double kept = dec.s.head(k).squaredNorm();
  const double norm = std::sqrt(kept);

  std::vector<double> s_new(k);
  for (Eigen::Index i = 0; i < k; ++i) s_new[i] = dec.s[i] / norm;

  // B[n+1] = V^dagger; Gamma[n+1] = B[n+1] / S[n+2].
  const Matrix vk = dec.v.leftCols(k);
  Matrix b1_new = regroup(vk.adjoint(), k * static_cast<Eigen::Index>(d));
  const auto& sr = schmidt_[site + 2];
  for (Eigen::Index j = 0; j < b1_new.cols(); ++j) b1_new.col(j) /= sr[j];
  // B[n] = theta_g V / norm; Gamma[n] = B[n] / S_new.
  Matrix b0_new = theta_g * vk / norm;
  for (Eigen::Index j = 0; j < k; ++j) b0_new.col(j) /= s_new[j];

  gammas_[site] = site_tensor(b0_new, cl, d, k);
  gammas_[site + 1] = site_tensor(b1_new, k, d, cr);
  schmidt_[site + 1] = std::move(s_new);
  const double dropped = (total - kept) / total;
  // Truncation and non-unitary gates leave the orthogonality conditions
  // only approximately satisfied away from the two updated sites.
  if (!is_unitary(gate) || dropped > kExactTruncation) canonical_ = false;
  return dropped;
}

void MatrixProductState::apply_local(const Matrix& op, std::size_t site) {
  const std::size_t d = phys_dim_;
  if (op.rows() != static_cast<Eigen::Index>(d) ||
      op.cols() != static_cast<Eigen::Index>(d)) {
    throw DimensionError("apply_local: operator must be d x d");
  }
  const Tensor& g = gamma(site);
  const std::size_t cl = g.extent(0);
  const std::size_t cr = g.extent(2);
  RowMatrix data = g.row_view(cl * d, cr);
  for (std::size_t a = 0; a < cl; ++a) {
    Eigen::Map<RowMatrix> block(data.data() + a * d * cr, d, cr);
    const RowMatrix updated = op * block;
    block = updated;
  }
  gammas_[site] = site_tensor(data, cl, d, cr);
  if (!is_unitary(op)) canonical_ = false;
}

void MatrixProductState::canonicalize_in_place() {
  const std::size_t len = length();
  const auto d = static_cast<Eigen::Index>(phys_dim_);

  std::vector<Matrix> sites(len);
  for (std::size_t n = 0; n < len; ++n) sites[n] = right_site(n);

  // Left sweep: QR, pushing R into the next site.
  Matrix carry = Matrix::Identity(1, 1);
  for (std::size_t n = 0; n < len; ++n) {
    const Eigen::Index left = sites[n].rows() / d;
    const Matrix grouped = carry * regroup(sites[n], left);
    Matrix m = regroup(grouped, carry.rows() * d);
    if (n + 1 == len) {
      sites[n] = m;
      break;
    }
    Eigen::HouseholderQR<Matrix> qr(m);
    const Eigen::Index k = std::min(m.rows(), m.cols());
    sites[n] = qr.householderQ() * Matrix::Identity(m.rows(), k);
    carry = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  }

  // Right sweep: SVD, producing right-canonical B[n] and Schmidt values.
  std::vector<Matrix> b(len);
  std::vector<std::vector<double>> schmidt(len + 1);
  schmidt[0] = {1.0};
  schmidt[len] = {1.0};
  carry = Matrix::Identity(1, 1);
  for (std::size_t n = len; n-- > 0;) {
    const Eigen::Index left = sites[n].rows() / d;
    const Matrix x = regroup(sites[n] * carry, left);  // left x (d k)
    if (!x.allFinite()) throw NumericError("canonicalize: non-finite tensor");
    if (n == 0) {
      const double norm = x.norm();
      if (!(norm > 0.0)) {
        throw DegenerateStateError("canonicalize: zero-norm state");
      }
      b[0] = regroup(x / norm, d);
      break;
    }
    const linalg::Svd dec = linalg::svd(x);
    const Eigen::Index k = significant_rank(dec.s);
    if (k == 0) throw DegenerateStateError("canonicalize: zero-norm state");
    const RealVector s = dec.s.head(k);
    const double norm = s.norm();
    b[n] = regroup(dec.v.leftCols(k).adjoint(), k * d);
    schmidt[n].resize(k);
    for (Eigen::Index i = 0; i < k; ++i) schmidt[n][i] = s[i] / norm;
    carry = dec.u.leftCols(k) * s.asDiagonal();
  }

  for (std::size_t n = 0; n < len; ++n) {
    Matrix g = b[n];
    const auto& sr = schmidt[n + 1];
    for (Eigen::Index j = 0; j < g.cols(); ++j) g.col(j) /= sr[j];
    gammas_[n] = site_tensor(g, schmidt[n].size(), phys_dim_, sr.size());
  }
  schmidt_ = std::move(schmidt);
  canonical_ = true;
}

MatrixProductState random_mps(std::size_t length, std::size_t phys_dim,
                              std::size_t chi, std::uint64_t seed) {
  if (length < 2) throw ArgumentError("random_mps: length must be >= 2");
  if (chi < 1) throw ArgumentError("random_mps: chi must be >= 1");
  if (phys_dim < 1) throw ArgumentError("random_mps: phys_dim must be >= 1");
  std::mt19937_64 rng(seed);
  auto cap = [&](std::size_t n) {
    // min(chi, d^n, d^(L-n)) without overflow.
    std::size_t dim = 1;
    const std::size_t span = std::min(n, length - n);
    for (std::size_t i = 0; i < span && dim < chi; ++i) dim *= phys_dim;
    return std::min(dim, chi);
  };
  std::vector<Tensor> sites;
  for (std::size_t n = 0; n < length; ++n) {
    const std::size_t cl = cap(n);
    const std::size_t cr = cap(n + 1);
    sites.push_back(Tensor::from_matrix(
        linalg::random_gaussian(cl * phys_dim, cr, rng), {cl, phys_dim, cr}));
  }
  return canonicalize(MatrixProductState::from_site_tensors(std::move(sites)));
}

MatrixProductState product_mps(const std::vector<Vector>& site_vectors) {
  if (site_vectors.empty()) throw ArgumentError("product_mps: empty");
  const std::size_t d = site_vectors[0].size();
  std::vector<Tensor> gammas;
  bool normalized = true;
  for (const auto& v : site_vectors) {
    if (static_cast<std::size_t>(v.size()) != d) {
      throw ArgumentError("product_mps: inconsistent local dimension");
    }
    normalized = normalized && std::abs(v.norm() - 1.0) < 1e-12;
    gammas.push_back(Tensor::from_matrix(v, {1, d, 1}));
  }
  std::vector<std::vector<double>> schmidt(site_vectors.size() + 1, {1.0});
  return MatrixProductState(std::move(gammas), std::move(schmidt), normalized);
}

MatrixProductState canonicalize(MatrixProductState state) {
  state.canonicalize_in_place();
  return state;
}

double canonical_residual(const MatrixProductState& state) {
  const std::size_t d = state.phys_dim();
  double worst = 0.0;
  for (std::size_t n = 0; n < state.length(); ++n) {
    const Matrix a = state.left_site(n);
    const Matrix id_r = Matrix::Identity(a.cols(), a.cols());
    worst = std::max(worst, max_abs(a.adjoint() * a - id_r));
    const Matrix b = regroup(state.right_site(n), a.rows() / d);
    const Matrix id_l = Matrix::Identity(b.rows(), b.rows());
    worst = std::max(worst, max_abs(b * b.adjoint() - id_l));
  }
  return worst;
}

cplx overlap(const MatrixProductState& a, const MatrixProductState& b) {
  if (a.length() != b.length() || a.phys_dim() != b.phys_dim()) {
    throw ArgumentError("overlap: states have different shapes");
  }
  Matrix env = Matrix::Identity(1, 1);
  for (std::size_t n = 0; n < a.length(); ++n) {
    env = detail::mixed_left(env, a.right_site(n), b.right_site(n),
                             a.phys_dim());
  }
  return env(0, 0);
}

namespace {

void require_canonical(const MatrixProductState& s, const char* where) {
  if (!s.is_canonical()) {
    throw StateError(std::string(where) + ": state is not canonical");
  }
}

}  // namespace

cplx expect_local(const MatrixProductState& state, const Tensor& op,
                  std::size_t site) {
  require_canonical(state, "expect_local");
  if (site >= state.length()) throw ArgumentError("expect_local: bad site");
  const std::size_t d = state.phys_dim();
  if (op.rank() != 2 || op.extent(0) != d || op.extent(1) != d) {
    throw DimensionError("expect_local: operator must be d x d");
  }
  Matrix theta = state.right_site(site);
  const auto& sl = state.schmidt(site);
  for (Eigen::Index r = 0; r < theta.rows(); ++r) {
    theta.row(r) *= sl[r / static_cast<Eigen::Index>(d)];
  }
  const Matrix o = op.matrix();
  cplx value = 0.0;
  for (std::size_t s = 0; s < d; ++s) {
    for (std::size_t t = 0; t < d; ++t) {
      if (o(s, t) == cplx(0.0)) continue;
      value += o(s, t) *
               (phys_slice(theta, s, d).conjugate().cwiseProduct(
                    phys_slice(theta, t, d)))
                   .sum();
    }
  }
  return value;
}

cplx expect_two_site(const MatrixProductState& state, const Tensor& op,
                     std::size_t site) {
  require_canonical(state, "expect_two_site");
  if (site + 1 >= state.length()) {
    throw ArgumentError("expect_two_site: bad site");
  }
  const std::size_t d = state.phys_dim();
  if (op.rank() != 4 || op.size() != d * d * d * d) {
    throw DimensionError("expect_two_site: operator must be (d,d,d,d)");
  }
  Matrix b0 = state.right_site(site);
  const auto& sl = state.schmidt(site);
  for (Eigen::Index r = 0; r < b0.rows(); ++r) {
    b0.row(r) *= sl[r / static_cast<Eigen::Index>(d)];
  }
  const RowMatrix theta = b0 * regroup(state.right_site(site + 1), b0.cols());
  const std::size_t cl = state.bond_dim(site);
  const std::size_t cr = state.bond_dim(site + 2);
  Matrix gram = Matrix::Zero(d * d, d * d);
  for (std::size_t a = 0; a < cl; ++a) {
    Eigen::Map<const RowMatrix> block(theta.data() + a * d * d * cr, d * d, cr);
    gram.noalias() += block.conjugate() * block.transpose();
  }
  // <op> = sum_{p,q} op[p,q] conj(theta_p) theta_q.
  return op.matrix(2).cwiseProduct(gram).sum();
}

GateResult apply_two_site_gate(MatrixProductState state, const Tensor& gate,
                               std::size_t site,
                               const TruncationSpec& truncation) {
  require_canonical(state, "apply_two_site_gate");
  if (gate.rank() != 4) {
    throw ArgumentError("apply_two_site_gate: gate must be rank 4");
  }
  const double dropped = state.apply_gate(gate.matrix(2), site, truncation);
  if (!state.is_canonical()) state.canonicalize_in_place();
  return {std::move(state), dropped};
}

double correlation_length(const MatrixProductState& state) {
  require_canonical(state, "correlation_length");
  const std::size_t len = state.length();
  // Nearest site to the middle with a square tensor.
  auto square = [&](std::size_t n) {
    return n < len && state.bond_dim(n) == state.bond_dim(n + 1);
  };
  std::size_t site = len;
  for (std::size_t off = 0; off <= len / 2 && site == len; ++off) {
    if (square(len / 2 - off)) {
      site = len / 2 - off;
    } else if (square(len / 2 + off)) {
      site = len / 2 + off;
    }
  }
  if (site == len) {
    throw StateError("correlation_length: no square mid-chain tensor");
  }
  const std::size_t chi = state.bond_dim(site);
  if (chi == 1) return 0.0;
  const std::size_t d = state.phys_dim();
  const Matrix a = state.left_site(site);
  Matrix transfer = Matrix::Zero(chi * chi, chi * chi);
  for (std::size_t s = 0; s < d; ++s) {
    const Matrix as = phys_slice(a, s, d);
    transfer += Eigen::kroneckerProduct(as, as.conjugate()).eval();
  }
  Eigen::ComplexEigenSolver<Matrix> eig(transfer, false);
  if (eig.info() != Eigen::Success) {
    throw NumericError("correlation_length: eigensolver failed");
  }
  std::vector<double> mags;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    mags.push_back(std::abs(eig.eigenvalues()[i]));
  }
  std::sort(mags.begin(), mags.end(), std::greater<>());
  if (!(mags[0] > 0.0)) return 0.0;
  const double ratio = mags[1] / mags[0];
  if (ratio >= 1.0 - 1e-12) return std::numeric_limits<double>::infinity();
  if (ratio <= 0.0) return 0.0;
  return -1.0 / std::log(ratio);
}

}  // namespace subfid
