#include "subfid/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "subfid/errors.hpp"
#include "subfid/linalg.hpp"
#include "transfer.hpp"

namespace subfid {

using detail::regroup;

namespace {

std::size_t checked_power(std::size_t d, std::size_t n) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < n; ++i) {
    out *= d;
    if (out > kOracleCapacity) {
      throw CapacityError("oracle: more than 2^20 amplitudes requested");
    }
  }
  return out;
}

// Local dimension from the vector size and chain length.
std::size_t local_dim(std::size_t size, std::size_t length) {
  if (length == 0) throw ArgumentError("oracle: length must be positive");
  const auto guess = static_cast<std::size_t>(
      std::llround(std::pow(static_cast<double>(size), 1.0 / length)));
  for (std::size_t d = std::max<std::size_t>(guess, 2) - 1; d <= guess + 1; ++d) {
    std::size_t v = 1;
    for (std::size_t i = 0; i < length && v <= size; ++i) v *= d;
    if (v == size) return d;
  }
  throw DimensionError("oracle: vector size is not d^L");
}

}  // namespace

Tensor mps_to_statevector(const MatrixProductState& state) {
  const std::size_t d = state.phys_dim();
  checked_power(d, state.length());
  Matrix p = Matrix::Identity(1, 1);
  for (std::size_t n = 0; n < state.length(); ++n) {
    const Matrix site = regroup(state.right_site(n), p.cols());
    p = regroup(p * site, p.rows() * static_cast<Eigen::Index>(d));
  }
  return Tensor::from_vector(p.col(0));
}

Tensor ttn_to_statevector(const TreeTensorNetwork& ttn) {
  const std::size_t d = ttn.phys_dim();
  checked_power(d, ttn.length());
  // Basis vectors of the current level, one row per upward index.
  std::vector<Matrix> level(ttn.length(), Matrix::Identity(d, d));
  auto merge = [](const Matrix& left, const Matrix& coeff, const Matrix& right) {
    // sum_{l,r} coeff[l,r] left[l,:] ⊗ right[r,:], row-major flattened.
    const RowMatrix m = left.transpose() * coeff * right;
    return Eigen::Map<const Eigen::RowVectorXcd>(m.data(), m.size()).eval();
  };
  for (std::size_t t = 1; t < ttn.depth(); ++t) {
    std::vector<Matrix> next;
    const auto& tensors = ttn.layer(t);
    for (std::size_t p = 0; p < tensors.size(); ++p) {
      const Tensor& w = tensors[p];
      const std::size_t top = w.extent(0);
      const Matrix& left = level[2 * p];
      const Matrix& right = level[2 * p + 1];
      Matrix basis(top, left.cols() * right.cols());
      for (std::size_t a = 0; a < top; ++a) {
        const Matrix coeff =
            Eigen::Map<const RowMatrix>(w.data().data() + a * w.extent(1) * w.extent(2),
                                        w.extent(1), w.extent(2));
        basis.row(a) = merge(left, coeff, right);
      }
      next.push_back(std::move(basis));
    }
    level = std::move(next);
  }
  const Eigen::RowVectorXcd psi = merge(level[0], ttn.top().matrix(), level[1]);
  return Tensor::from_vector(psi.transpose());
}

DensityMatrix reduced_density_matrix(const Tensor& vec, std::size_t length,
                                     std::size_t x0, std::size_t x1) {
  if (vec.rank() != 1) throw ArgumentError("reduced_density_matrix: need a vector");
  if (!(x0 < x1) || x1 > length) {
    throw ArgumentError("reduced_density_matrix: window must satisfy x0 < x1 <= L");
  }
  if (x0 == 0 && x1 == length) {
    throw ArgumentError("reduced_density_matrix: region covers the whole chain");
  }
  const std::size_t d = local_dim(vec.size(), length);
  const std::size_t nl = checked_power(d, x0);
  const std::size_t nm = checked_power(d, x1 - x0);
  const std::size_t nr = checked_power(d, length - x1);
  const Vector v = vec.vector();
  if (std::abs(v.norm() - 1.0) > 1e-10) {
    throw ArgumentError("reduced_density_matrix: vector is not normalized");
  }
  Matrix rho = Matrix::Zero(nm, nm);
  for (std::size_t l = 0; l < nl; ++l) {
    Eigen::Map<const RowMatrix> block(v.data() + l * nm * nr, nm, nr);
    rho.noalias() += block * block.adjoint();
  }
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return {Tensor::from_matrix(rho), x0, x1};
}

UhlmannDetail uhlmann_detail(const Tensor& rho, const Tensor& sigma) {
  if (rho.rank() != 2 || sigma.rank() != 2 || rho.shape() != sigma.shape() ||
      rho.extent(0) != rho.extent(1)) {
    throw ArgumentError("uhlmann_exact: need square matrices of equal size");
  }
  const Matrix sr = linalg::psd_sqrt(rho.matrix());
  const Matrix ss = linalg::psd_sqrt(sigma.matrix());
  UhlmannDetail out;
  out.via_trace_norm = linalg::trace_norm(ss * sr);
  const Matrix m = sr * sigma.matrix() * sr;
  const linalg::Eig eig = linalg::hermitian_eig(0.5 * (m + m.adjoint()));
  const double cut = eig.values.size() > 0 ? kPsdClip * std::max(eig.values[0], 0.0) : 0.0;
  for (double lam : eig.values) {
    if (lam > cut) out.via_eigenvalues += std::sqrt(lam);
  }
  return out;
}

double uhlmann_exact(const Tensor& rho, const Tensor& sigma) {
  if (rho.rank() != 2 || sigma.rank() != 2 || rho.shape() != sigma.shape() ||
      rho.extent(0) != rho.extent(1)) {
    throw ArgumentError("uhlmann_exact: need square matrices of equal size");
  }
  // ||sqrt(sigma) sqrt(rho)||_tr = ||C_sigma^dagger C_rho||_tr for any factors
  // with C C^dagger = rho; the rank-width factors keep the SVD small.
  const Matrix cr = linalg::psd_factor(rho.matrix());
  const Matrix cs = linalg::psd_factor(sigma.matrix());
  return linalg::trace_norm(cs.adjoint() * cr);
}

double uhlmann_exact(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return uhlmann_exact(rho.matrix, sigma.matrix);
}

RestrictedResult restricted_fidelity(const Tensor& a, const Tensor& b,
                                     std::size_t length, std::size_t x0,
                                     std::size_t x1, RestrictionMode mode,
                                     const RestrictedOptions& options) {
  if (a.rank() != 1 || a.shape() != b.shape()) {
    throw ArgumentError("restricted_fidelity: need two vectors of equal size");
  }
  if (!(x0 < x1) || x1 > length) {
    throw ArgumentError("restricted_fidelity: window must satisfy x0 < x1 <= L");
  }
  const std::size_t d = local_dim(a.size(), length);
  const std::size_t nl = checked_power(d, x0);
  const std::size_t nm = checked_power(d, x1 - x0);
  const std::size_t nr = checked_power(d, length - x1);
  const Vector va = a.vector();
  const Vector vb = b.vector();

  // Slices A_m, B_m of shape (left x right) for each window index m.
  auto slice = [&](const Vector& v, std::size_t m) {
    Matrix out(nl, nr);
    for (std::size_t l = 0; l < nl; ++l) {
      for (std::size_t r = 0; r < nr; ++r) out(l, r) = v[(l * nm + m) * nr + r];
    }
    return out;
  };
  std::vector<Matrix> sa, sb;
  for (std::size_t m = 0; m < nm; ++m) {
    sa.push_back(slice(va, m));
    sb.push_back(slice(vb, m));
  }

  if (mode == RestrictionMode::joint) {
    // K[c, c'] = sum_m a[m, c] conj(b[m, c']) with c = (l, r).
    Matrix am(nm, nl * nr), bm(nm, nl * nr);
    for (std::size_t m = 0; m < nm; ++m) {
      am.row(m) = Eigen::Map<const RowMatrix>(RowMatrix(sa[m]).data(), 1, nl * nr);
      bm.row(m) = Eigen::Map<const RowMatrix>(RowMatrix(sb[m]).data(), 1, nl * nr);
    }
    return {linalg::trace_norm(am.transpose() * bm.conjugate()), true};
  }

  auto left_env = [&](const Matrix& ur) {
    Matrix m = Matrix::Zero(nl, nl);
    for (std::size_t k = 0; k < nm; ++k) m += sa[k] * ur.transpose() * sb[k].adjoint();
    return m;
  };
  auto right_env = [&](const Matrix& ul) {
    Matrix m = Matrix::Zero(nr, nr);
    for (std::size_t k = 0; k < nm; ++k) {
      m += sa[k].transpose() * ul.transpose() * sb[k].conjugate();
    }
    return m;
  };

  std::mt19937_64 rng(options.seed);
  RestrictedResult best{-1.0, false};
  for (std::size_t start = 0; start < std::max<std::size_t>(options.restarts, 1); ++start) {
    Matrix ur = start == 0 ? Matrix(Matrix::Identity(nr, nr))
                           : linalg::random_unitary(nr, rng);
    double value = -1.0;
    bool converged = false;
    for (std::size_t it = 0; it < options.max_iterations; ++it) {
      const Matrix ul = linalg::optimal_isometry(left_env(ur)).w;
      const linalg::Isometry right = linalg::optimal_isometry(right_env(ul));
      ur = right.w;
      const double prev = value;
      value = right.value;
      if (prev >= 0.0 && std::abs(value - prev) <= options.tolerance * std::max(value, 1e-300)) {
        converged = true;
        break;
      }
    }
    if (value > best.value) best = {value, converged};
  }
  return best;
}

Tensor purify(const Tensor& x, const Tensor& w) {
  if (x.rank() != 2 || w.rank() != 2 || x.extent(1) != w.extent(0)) {
    throw ArgumentError("purify: need x (n x k) and w (k x m)");
  }
  const Matrix wm = w.matrix();
  if (wm.rows() > wm.cols() ||
      max_abs(wm * wm.adjoint() - Matrix::Identity(wm.rows(), wm.rows())) > 1e-10) {
    throw ArgumentError("purify: w must satisfy w w^dagger = 1");
  }
  return Tensor::from_matrix(x.matrix() * wm);
}

Tensor purification_decompose(const Tensor& phi, const Tensor& x) {
  if (phi.rank() != 2 || x.rank() != 2 || phi.extent(0) != x.extent(0)) {
    throw ArgumentError("purification_decompose: phi and x need equal row counts");
  }
  const Matrix pm = phi.matrix();
  const Matrix xm = x.matrix();
  if (pm.cols() < xm.cols()) {
    throw ArgumentError("purification_decompose: ancilla smaller than x's width");
  }
  const Matrix rho = xm * xm.adjoint();
  if (max_abs(pm * pm.adjoint() - rho) > 1e-10 * std::max(1.0, max_abs(rho))) {
    throw ArgumentError("purification_decompose: phi does not purify x x^dagger");
  }
  Eigen::JacobiSVD<Matrix> sx(xm, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::JacobiSVD<Matrix> sp(pm, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector s = sx.singularValues();
  Eigen::Index k = 0;
  while (k < s.size() && s[k] > 1e-10 * s[0]) ++k;

  const Eigen::Index cx = xm.cols();
  const Eigen::Index cp = pm.cols();
  Matrix ux = Matrix::Identity(cx, cx);
  if (k > 0) {
    const Matrix q = sx.matrixU().leftCols(k).adjoint() * sp.matrixU().leftCols(k);
    const RealVector sk = s.head(k);
    const Matrix aligned = sk.cwiseInverse().asDiagonal() * q * sk.asDiagonal();
    ux.topLeftCorner(k, k) = linalg::polar_isometry(aligned);
  }
  const Matrix embed = Matrix::Identity(cx, cp);
  const Matrix w = sx.matrixV() * ux * embed * sp.matrixV().adjoint();
  return Tensor::from_matrix(w);
}

Tensor exact_evolution(const Tensor& vec, const Matrix& hamiltonian, double t) {
  const Matrix u = linalg::hermitian_exp(hamiltonian, cplx(0.0, -t));
  return Tensor::from_vector(u * vec.vector());
}

}  // namespace subfid
