#include "subfid/fidelity_mps.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "subfid/errors.hpp"
#include "subfid/linalg.hpp"
#include "transfer.hpp"

namespace subfid {

using detail::mixed_left;
using detail::mixed_right;
using detail::regroup;

std::string to_string(FidelityMethod method) {
  switch (method) {
    case FidelityMethod::half_system:
      return "half-system";
    case FidelityMethod::window_uhlmann:
      return "window-uhlmann";
    case FidelityMethod::window_disjoint:
      return "window-disjoint";
    case FidelityMethod::ttn_branch:
      return "ttn-branch";
  }
  return "unknown";
}

namespace {

void require_pair(const MatrixProductState& a, const MatrixProductState& b,
                  const char* where) {
  if (a.length() != b.length() || a.phys_dim() != b.phys_dim()) {
    throw ArgumentError(std::string(where) + ": states have different shapes");
  }
  if (!a.is_canonical() || !b.is_canonical()) {
    throw StateError(std::string(where) + ": states must be canonical");
  }
}

void require_window(const MatrixProductState& a, std::size_t x0,
                    std::size_t x1, const char* where) {
  if (!(x0 < x1) || x1 > a.length()) {
    throw ArgumentError(std::string(where) + ": window must satisfy x0 < x1 <= L");
  }
}

FidelityReport trace_norm_report(const Matrix& core, FidelityMethod method) {
  const RealVector s = linalg::singular_values(core);
  FidelityReport r;
  r.method = method;
  r.singular_spectrum.assign(s.data(), s.data() + s.size());
  r.value = s.sum();
  return r;
}

Matrix scale_rows_cols(Matrix m, const std::vector<double>& rows,
                       const std::vector<double>& cols) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) *= rows[i];
  for (Eigen::Index j = 0; j < m.cols(); ++j) m.col(j) *= cols[j];
  return m;
}

// Window wavefunction S[x0] B[x0] ... B[x1-1] as a d^w x (chi_l chi_r)
// matrix, column index alpha * chi_r + beta.
Matrix window_wavefunction(const MatrixProductState& s, std::size_t x0,
                           std::size_t x1) {
  const auto d = static_cast<Eigen::Index>(s.phys_dim());
  const auto& sl = s.schmidt(x0);
  Matrix p = s.right_site(x0);
  for (Eigen::Index r = 0; r < p.rows(); ++r) p.row(r) *= sl[r / d];
  for (std::size_t n = x0 + 1; n < x1; ++n) {
    const Matrix next = regroup(s.right_site(n), p.cols());
    p = regroup(p * next, p.rows() * d);
  }
  const Eigen::Index chi_l = static_cast<Eigen::Index>(sl.size());
  const Eigen::Index chi_r = p.cols();
  const Eigen::Index n = p.rows() / chi_l;
  Matrix out(n, chi_l * chi_r);
  for (Eigen::Index a = 0; a < chi_l; ++a) {
    out.middleCols(a * chi_r, chi_r) = p.middleRows(a * n, n);
  }
  return out;
}

// R factor of the thin QR of psi^dagger, so psi = R^dagger Q^dagger.
Matrix adjoint_r_factor(const Matrix& psi) {
  const Matrix t = psi.adjoint();
  Eigen::HouseholderQR<Matrix> qr(t);
  const Eigen::Index k = std::min(t.rows(), t.cols());
  return qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
}

FidelityReport window_physical(const MatrixProductState& a,
                               const MatrixProductState& b, std::size_t x0,
                               std::size_t x1) {
  const Matrix ra = adjoint_r_factor(window_wavefunction(a, x0, x1));
  const Matrix rb = adjoint_r_factor(window_wavefunction(b, x0, x1));
  // phi^dagger psi = Q_b R_b R_a^dagger Q_a^dagger.
  return trace_norm_report(rb * ra.adjoint(), FidelityMethod::window_uhlmann);
}

// Mixed transfer of a run of right-canonical sites, axes (a', a, b', b):
// primed legs belong to the bra state b.
class WindowTransfer {
 public:
  WindowTransfer(const MatrixProductState& a, const MatrixProductState& b,
                 std::size_t site)
      : a_(a), b_(b), x0_(site), x1_(site) {
    const std::size_t ca = a.bond_dim(site);
    const std::size_t cb = b.bond_dim(site);
    x_ = Tensor({cb, ca, cb, ca});
    for (std::size_t i = 0; i < cb; ++i) {
      for (std::size_t j = 0; j < ca; ++j) x_({i, j, i, j}) = 1.0;
    }
  }

  void extend_right() {
    const Tensor ta = site(a_, x1_);
    const Tensor tb = site(b_, x1_).conj();
    const Tensor y = contract(x_, ta, {{3, 0}});      // a' a b' s c
    const Tensor z = contract(y, tb, {{2, 0}, {3, 1}});  // a' a c c'
    x_ = z.permute({0, 1, 3, 2});
    ++x1_;
  }

  void extend_left() {
    --x0_;
    const Tensor ta = site(a_, x0_);
    const Tensor tb = site(b_, x0_).conj();
    const Tensor y = contract(ta, x_, {{2, 1}});         // c s a' b' b
    x_ = contract(tb, y, {{1, 1}, {2, 2}});              // c' c b' b
  }

  std::size_t x0() const { return x0_; }
  std::size_t x1() const { return x1_; }

  // Core matrix (a' b') x (a b) with the left Schmidt weights applied.
  Matrix core() const {
    const auto& sa = a_.schmidt(x0_);
    const auto& sb = b_.schmidt(x0_);
    Tensor w = x_;
    const Shape& sh = w.shape();
    auto data = w.data();
    std::size_t idx = 0;
    for (std::size_t i = 0; i < sh[0]; ++i) {
      for (std::size_t j = 0; j < sh[1]; ++j) {
        const double f = sb[i] * sa[j];
        for (std::size_t k = 0; k < sh[2] * sh[3]; ++k) data[idx++] *= f;
      }
    }
    return w.permute({0, 2, 1, 3}).matrix(2);
  }

 private:
  static Tensor site(const MatrixProductState& s, std::size_t n) {
    const Tensor& g = s.gamma(n);
    return Tensor::from_matrix(s.right_site(n), g.shape());
  }

  const MatrixProductState& a_;
  const MatrixProductState& b_;
  std::size_t x0_;
  std::size_t x1_;
  Tensor x_;
};

FidelityReport window_transfer(const MatrixProductState& a,
                               const MatrixProductState& b, std::size_t x0,
                               std::size_t x1) {
  WindowTransfer t(a, b, x0);
  while (t.x1() < x1) t.extend_right();
  return trace_norm_report(t.core(), FidelityMethod::window_uhlmann);
}

// d^w capped, to compare against bond-space sizes without overflow.
std::size_t physical_size(std::size_t d, std::size_t w, std::size_t cap) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < w && n <= cap; ++i) n *= d;
  return n;
}

bool prefer_physical(const MatrixProductState& a, const MatrixProductState& b,
                     std::size_t x0, std::size_t x1) {
  const std::size_t ma = a.bond_dim(x0) * a.bond_dim(x1);
  const std::size_t mb = b.bond_dim(x0) * b.bond_dim(x1);
  const std::size_t m = std::min(ma, mb);
  return physical_size(a.phys_dim(), x1 - x0, m) <= m;
}

}  // namespace

FidelityReport half_system_fidelity(const MatrixProductState& a,
                                    const MatrixProductState& b,
                                    std::size_t cut, Side side) {
  require_pair(a, b, "half_system_fidelity");
  const std::size_t len = a.length();
  if (cut == 0 || cut >= len) {
    throw ArgumentError("half_system_fidelity: cut must satisfy 0 < cut < L");
  }
  const std::size_t d = a.phys_dim();
  Matrix env = Matrix::Identity(1, 1);
  if (side == Side::left) {
    for (std::size_t n = 0; n < cut; ++n) {
      env = mixed_left(env, b.right_site(n), a.right_site(n), d);
    }
    return trace_norm_report(env, FidelityMethod::half_system);
  }
  for (std::size_t n = len; n-- > cut;) {
    env = mixed_right(env, b.right_site(n), a.right_site(n), d);
  }
  return trace_norm_report(scale_rows_cols(env, b.schmidt(cut), a.schmidt(cut)),
                           FidelityMethod::half_system);
}

std::vector<FidelityReport> half_system_profile(const MatrixProductState& a,
                                                const MatrixProductState& b,
                                                Side side) {
  require_pair(a, b, "half_system_profile");
  const std::size_t len = a.length();
  const std::size_t d = a.phys_dim();
  std::vector<FidelityReport> out(len - 1);
  Matrix env = Matrix::Identity(1, 1);
  if (side == Side::left) {
    for (std::size_t n = 0; n + 1 < len; ++n) {
      env = mixed_left(env, b.right_site(n), a.right_site(n), d);
      out[n] = trace_norm_report(env, FidelityMethod::half_system);
    }
    return out;
  }
  for (std::size_t n = len; n-- > 1;) {
    env = mixed_right(env, b.right_site(n), a.right_site(n), d);
    out[n - 1] = trace_norm_report(
        scale_rows_cols(env, b.schmidt(n), a.schmidt(n)),
        FidelityMethod::half_system);
  }
  return out;
}

FidelityReport window_fidelity(const MatrixProductState& a,
                               const MatrixProductState& b, std::size_t x0,
                               std::size_t x1,
                               WindowContraction contraction) {
  require_pair(a, b, "window_fidelity");
  require_window(a, x0, x1, "window_fidelity");
  if (contraction == WindowContraction::automatic) {
    contraction = prefer_physical(a, b, x0, x1) ? WindowContraction::physical
                                                : WindowContraction::transfer;
  }
  if (contraction == WindowContraction::physical) {
    return window_physical(a, b, x0, x1);
  }
  return window_transfer(a, b, x0, x1);
}

FidelityReport disjoint_window_fidelity(const MatrixProductState& a,
                                        const MatrixProductState& b,
                                        std::size_t x0, std::size_t x1,
                                        const DisjointOptions& options) {
  require_pair(a, b, "disjoint_window_fidelity");
  require_window(a, x0, x1, "disjoint_window_fidelity");
  if (options.restarts == 0 || options.max_iterations == 0) {
    throw ArgumentError("disjoint_window_fidelity: need restarts and iterations");
  }
  const std::size_t d = a.phys_dim();
  std::vector<Matrix> ba, bb;
  for (std::size_t n = x0; n < x1; ++n) {
    ba.push_back(a.right_site(n));
    bb.push_back(b.right_site(n));
  }
  const auto& sa = a.schmidt(x0);
  const auto& sb = b.schmidt(x0);

  // Optimal left isometry for a fixed right one, and vice versa. Both return
  // (b bond) x (a bond) matrices.
  auto solve_left = [&](const Matrix& wr) {
    Matrix env = wr;
    for (std::size_t i = ba.size(); i-- > 0;) {
      env = mixed_right(env, bb[i], ba[i], d);
    }
    return linalg::optimal_isometry(scale_rows_cols(env, sb, sa).transpose());
  };
  auto solve_right = [&](const Matrix& wl) {
    Matrix env = scale_rows_cols(wl, sb, sa);
    for (std::size_t i = 0; i < ba.size(); ++i) {
      env = mixed_left(env, bb[i], ba[i], d);
    }
    return linalg::optimal_isometry(env.transpose());
  };

  std::mt19937_64 rng(options.seed);
  const Eigen::Index rb = static_cast<Eigen::Index>(b.bond_dim(x1));
  const Eigen::Index ra = static_cast<Eigen::Index>(a.bond_dim(x1));

  FidelityReport best;
  best.method = FidelityMethod::window_disjoint;
  best.value = -1.0;
  for (std::size_t start = 0; start < options.restarts; ++start) {
    Matrix wr = start == 0 ? Matrix(Matrix::Identity(rb, ra))
                           : linalg::random_isometry(rb, ra, rng);
    double value = -1.0;
    bool converged = false;
    std::size_t it = 0;
    linalg::Isometry last;
    while (it < options.max_iterations) {
      ++it;
      const linalg::Isometry left = solve_left(wr);
      last = solve_right(left.w);
      wr = last.w;
      const double prev = value;
      value = last.value;
      if (prev >= 0.0 &&
          std::abs(value - prev) <= options.tolerance * std::max(value, 1e-300)) {
        converged = true;
        break;
      }
    }
    if (value > best.value) {
      best.value = value;
      best.iterations = it;
      best.converged = converged;
      best.singular_spectrum.assign(last.spectrum.data(),
                                    last.spectrum.data() + last.spectrum.size());
    }
  }
  best.restarts_used = options.restarts;
  return best;
}

std::vector<WindowProfileRow> centered_window_profile(
    const MatrixProductState& a, const MatrixProductState& b,
    std::size_t center, std::size_t max_width, bool with_disjoint,
    const DisjointOptions& options) {
  require_pair(a, b, "centered_window_profile");
  if (max_width == 0 || center < max_width / 2 ||
      center - max_width / 2 + max_width > a.length()) {
    throw ArgumentError("centered_window_profile: windows leave the chain");
  }
  std::vector<WindowProfileRow> rows;
  WindowTransfer transfer(a, b, center);
  for (std::size_t w = 1; w <= max_width; ++w) {
    const std::size_t x0 = center - w / 2;
    const std::size_t x1 = x0 + w;
    while (transfer.x0() > x0) transfer.extend_left();
    while (transfer.x1() < x1) transfer.extend_right();
    WindowProfileRow row;
    row.x0 = x0;
    row.x1 = x1;
    row.uhlmann = prefer_physical(a, b, x0, x1)
                      ? window_physical(a, b, x0, x1)
                      : trace_norm_report(transfer.core(),
                                          FidelityMethod::window_uhlmann);
    if (with_disjoint) {
      row.disjoint = disjoint_window_fidelity(a, b, x0, x1, options);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace subfid
