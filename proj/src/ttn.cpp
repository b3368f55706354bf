#include "subfid/ttn.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "subfid/errors.hpp"
#include "subfid/linalg.hpp"

namespace subfid {

namespace {

constexpr double kIsometryTolerance = 1e-10;

double tensor_isometry_residual(const Tensor& w) {
  const Matrix m = w.matrix(1);
  return max_abs(m * m.adjoint() - Matrix::Identity(m.rows(), m.rows()));
}

}  // namespace

TreeTensorNetwork::TreeTensorNetwork(std::size_t phys_dim,
                                     std::vector<std::vector<Tensor>> layers,
                                     Tensor top)
    : phys_dim_(phys_dim), layers_(std::move(layers)), top_(std::move(top)) {
  validate();
}

void TreeTensorNetwork::validate() const {
  if (phys_dim_ == 0) throw ArgumentError("TTN: phys_dim must be positive");
  const std::size_t len = length();
  // Upward extents of the current level, starting from the physical sites.
  std::vector<std::size_t> below(len, phys_dim_);
  for (std::size_t t = 1; t < depth(); ++t) {
    const auto& tensors = layers_[t - 1];
    if (tensors.size() != (len >> t)) {
      throw DimensionError("TTN: layer " + std::to_string(t) +
                           " has the wrong number of tensors");
    }
    std::vector<std::size_t> up;
    for (std::size_t p = 0; p < tensors.size(); ++p) {
      const Tensor& w = tensors[p];
      if (w.rank() != 3 || w.extent(1) != below[2 * p] ||
          w.extent(2) != below[2 * p + 1]) {
        throw DimensionError("TTN: tensor (" + std::to_string(t) + ", " +
                             std::to_string(p) + ") does not fit its children");
      }
      if (w.extent(0) > w.extent(1) * w.extent(2) ||
          tensor_isometry_residual(w) > kIsometryTolerance) {
        throw ArgumentError("TTN: tensor (" + std::to_string(t) + ", " +
                            std::to_string(p) + ") is not isometric");
      }
      up.push_back(w.extent(0));
    }
    below = std::move(up);
  }
  if (top_.rank() != 2 || top_.extent(0) != below[0] ||
      top_.extent(1) != below[1]) {
    throw DimensionError("TTN: top tensor does not fit the top layer");
  }
  if (std::abs(top_.frobenius_norm() - 1.0) > kIsometryTolerance) {
    throw ArgumentError("TTN: top tensor must have unit norm");
  }
}

std::size_t TreeTensorNetwork::bond_dim(std::size_t layer) const {
  if (layer == 0) return phys_dim_;
  if (layer >= depth()) throw ArgumentError("TTN: layer out of range");
  return layers_[layer - 1][0].extent(0);
}

std::size_t TreeTensorNetwork::max_bond_dim() const {
  std::size_t m = phys_dim_;
  for (const auto& layer : layers_) {
    for (const auto& w : layer) m = std::max(m, w.extent(0));
  }
  return m;
}

const std::vector<Tensor>& TreeTensorNetwork::layer(std::size_t t) const {
  if (t == 0 || t >= depth()) throw ArgumentError("TTN: layer out of range");
  return layers_[t - 1];
}

const Tensor& TreeTensorNetwork::isometry(std::size_t t, std::size_t p) const {
  const auto& l = layer(t);
  if (p >= l.size()) throw ArgumentError("TTN: position out of range");
  return l[p];
}

void TreeTensorNetwork::set_isometry(std::size_t t, std::size_t p, Tensor w) {
  const Tensor& old = isometry(t, p);
  if (w.shape() != old.shape()) {
    throw DimensionError("TTN: replacement isometry has a different shape");
  }
  if (tensor_isometry_residual(w) > kIsometryTolerance) {
    throw ArgumentError("TTN: replacement tensor is not isometric");
  }
  layers_[t - 1][p] = std::move(w);
}

void TreeTensorNetwork::set_top(Tensor top) {
  if (top.shape() != top_.shape()) {
    throw DimensionError("TTN: replacement top tensor has a different shape");
  }
  if (std::abs(top.frobenius_norm() - 1.0) > kIsometryTolerance) {
    throw ArgumentError("TTN: top tensor must have unit norm");
  }
  top_ = std::move(top);
}

TreeTensorNetwork random_ttn(std::size_t depth, std::size_t chi,
                             std::size_t phys_dim, std::uint64_t seed) {
  if (depth < 2) throw ArgumentError("random_ttn: depth must be >= 2");
  if (chi < 1 || phys_dim < 1) {
    throw ArgumentError("random_ttn: chi and phys_dim must be positive");
  }
  std::mt19937_64 rng(seed);
  const std::size_t len = std::size_t{1} << depth;
  std::vector<std::vector<Tensor>> layers;
  std::size_t below = phys_dim;
  for (std::size_t t = 1; t < depth; ++t) {
    const std::size_t up = std::min(chi, below * below);
    std::vector<Tensor> tensors;
    for (std::size_t p = 0; p < (len >> t); ++p) {
      const Matrix w = linalg::random_isometry(up, below * below, rng);
      tensors.push_back(Tensor::from_matrix(w, {up, below, below}));
    }
    layers.push_back(std::move(tensors));
    below = up;
  }
  Matrix top = linalg::random_gaussian(below, below, rng);
  top /= top.norm();
  return TreeTensorNetwork(phys_dim, std::move(layers), Tensor::from_matrix(top));
}

TreeTensorNetwork product_ttn(const std::vector<Vector>& site_vectors) {
  const std::size_t len = site_vectors.size();
  if (len < 2 || (len & (len - 1)) != 0) {
    throw ArgumentError("product_ttn: need 2^depth site vectors");
  }
  const std::size_t d = site_vectors[0].size();
  std::vector<Vector> v;
  for (const auto& s : site_vectors) {
    if (static_cast<std::size_t>(s.size()) != d) {
      throw ArgumentError("product_ttn: inconsistent local dimension");
    }
    if (!(s.norm() > 0.0)) throw DegenerateStateError("product_ttn: zero vector");
    v.push_back(s / s.norm());
  }
  std::size_t depth = 0;
  while ((std::size_t{1} << depth) < len) ++depth;
  if (depth == 1) {
    return TreeTensorNetwork(d, {}, Tensor::from_matrix(v[0] * v[1].transpose()));
  }
  std::vector<std::vector<Tensor>> layers;
  std::vector<Tensor> first;
  for (std::size_t p = 0; p < len / 2; ++p) {
    const Matrix pair = v[2 * p] * v[2 * p + 1].transpose();
    first.push_back(Tensor::from_matrix(pair, {1, d, d}));
  }
  layers.push_back(std::move(first));
  for (std::size_t t = 2; t < depth; ++t) {
    layers.emplace_back(len >> t, Tensor({1, 1, 1}, {cplx(1.0)}));
  }
  return TreeTensorNetwork(d, std::move(layers), Tensor({1, 1}, {cplx(1.0)}));
}

double isometry_residual(const TreeTensorNetwork& ttn) {
  double worst = std::abs(ttn.top().frobenius_norm() - 1.0);
  for (std::size_t t = 1; t < ttn.depth(); ++t) {
    for (const auto& w : ttn.layer(t)) {
      worst = std::max(worst, tensor_isometry_residual(w));
    }
  }
  return worst;
}

std::vector<Branch> branch_regions(std::size_t depth) {
  std::vector<Branch> out;
  const std::size_t len = std::size_t{1} << depth;
  for (std::size_t t = 1; t < depth; ++t) {
    const std::size_t size = std::size_t{1} << t;
    for (std::size_t p = 0; p < len / size; ++p) {
      out.push_back({t, p, p * size, (p + 1) * size});
    }
  }
  return out;
}

std::vector<Branch> branch_regions(const TreeTensorNetwork& ttn) {
  return branch_regions(ttn.depth());
}

namespace {

void require_branch(const TreeTensorNetwork& ttn, const Branch& branch) {
  if (branch.layer == 0 || branch.layer >= ttn.depth() ||
      branch.position >= (ttn.length() >> branch.layer)) {
    throw ArgumentError("TTN: branch does not exist in this tree");
  }
}

// G'[l,l'] (left child) or G'[r,r'] (right child) from the parent's G[a,a'].
Tensor descend_one_site(const Tensor& w, const Tensor& g, bool left_child) {
  const Tensor y = contract(w, g, {{0, 0}});  // l r a'
  if (left_child) return contract(y, w.conj(), {{1, 2}, {2, 0}});
  return contract(y, w.conj(), {{0, 1}, {2, 0}});
}

}  // namespace

Tensor branch_environment(const TreeTensorNetwork& ttn, const Branch& branch) {
  require_branch(ttn, branch);
  const std::size_t depth = ttn.depth();
  const std::size_t t = branch.layer;
  // Index of the ancestor of the branch on layer s.
  auto ancestor = [&](std::size_t s) { return branch.position >> (s - t); };

  const Matrix top = ttn.top().matrix();
  Tensor g = ancestor(depth - 1) == 0
                 ? Tensor::from_matrix(top * top.adjoint())
                 : Tensor::from_matrix(top.transpose() * top.conjugate());
  for (std::size_t s = depth - 1; s > t; --s) {
    const Tensor& w = ttn.isometry(s, ancestor(s));
    g = descend_one_site(w, g, ancestor(s - 1) % 2 == 0);
  }
  const Matrix h = g.matrix();
  return Tensor::from_matrix(0.5 * (h + h.adjoint()));
}

namespace {

// B[b, a] = <phi^b_b | phi^a_a> for the basis states of a subtree.
Matrix branch_transfer(const TreeTensorNetwork& a, const TreeTensorNetwork& b,
                       std::size_t t, std::size_t p) {
  if (t == 0) return Matrix::Identity(a.phys_dim(), a.phys_dim());
  const Tensor left = Tensor::from_matrix(branch_transfer(a, b, t - 1, 2 * p));
  const Tensor right =
      Tensor::from_matrix(branch_transfer(a, b, t - 1, 2 * p + 1));
  const Tensor& wa = a.isometry(t, p);
  const Tensor wb = b.isometry(t, p).conj();
  const Tensor x = contract(wa, left, {{1, 1}});    // a r l'
  const Tensor y = contract(x, right, {{1, 1}});    // a l' r'
  return contract(wb, y, {{1, 1}, {2, 2}}).matrix();  // b a
}

}  // namespace

FidelityReport branch_fidelity(const TreeTensorNetwork& a,
                               const TreeTensorNetwork& b,
                               const Branch& branch) {
  if (a.depth() != b.depth() || a.phys_dim() != b.phys_dim()) {
    throw ArgumentError("branch_fidelity: trees have different shapes");
  }
  require_branch(a, branch);
  const Matrix ca = linalg::psd_factor(branch_environment(a, branch).matrix());
  const Matrix cb = linalg::psd_factor(branch_environment(b, branch).matrix());
  const Matrix t = branch_transfer(a, b, branch.layer, branch.position);
  const RealVector s = linalg::singular_values(cb.adjoint() * t * ca);
  FidelityReport r;
  r.method = FidelityMethod::ttn_branch;
  r.singular_spectrum.assign(s.data(), s.data() + s.size());
  r.value = s.sum();
  return r;
}

namespace {

// Operators coarse-grained to one level of the tree: one[q] acts on block q,
// two[q] on blocks (q, q+1) with row index (a, c) -> a * chi_{q+1} + c.
struct LevelOperators {
  std::vector<Matrix> one;
  std::vector<Matrix> two;
};

// Reduced states on one level, same layout, ket index on the rows.
struct LevelStates {
  std::vector<Matrix> one;
  std::vector<Matrix> two;
};

Tensor as4(const Matrix& m, std::size_t a, std::size_t b) {
  return Tensor::from_matrix(m, {a, b, a, b});
}

// QL[c,c',l,l'] = sum_r conj(w[c,l,r]) w[c',l',r].
Tensor left_gram(const Tensor& w) {
  return contract(w.conj(), w, {{2, 2}}).permute({0, 2, 1, 3});
}

// QR[a,a',r,r'] = sum_l conj(w[a,l,r]) w[a',l,r'].
Tensor right_gram(const Tensor& w) {
  return contract(w.conj(), w, {{1, 1}}).permute({0, 2, 1, 3});
}

Matrix in_parent(const Matrix& one_l, const Matrix& one_r, const Matrix& two) {
  const Matrix il = Matrix::Identity(one_l.rows(), one_l.rows());
  const Matrix ir = Matrix::Identity(one_r.rows(), one_r.rows());
  Matrix k = two;
  k += Eigen::kroneckerProduct(one_l, ir);
  k += Eigen::kroneckerProduct(il, one_r);
  return k;
}

// Partial traces of a two-block state with row index l * cr + r.
Matrix trace_right(const Matrix& pair, std::size_t cl, std::size_t cr) {
  Matrix out = Matrix::Zero(cl, cl);
  for (std::size_t r = 0; r < cr; ++r) {
    out += pair(Eigen::seqN(r, cl, cr), Eigen::seqN(r, cl, cr));
  }
  return out;
}

Matrix trace_left(const Matrix& pair, std::size_t cl, std::size_t cr) {
  Matrix out = Matrix::Zero(cr, cr);
  for (std::size_t l = 0; l < cl; ++l) out += pair.block(l * cr, l * cr, cr, cr);
  return out;
}

class TreeWork {
 public:
  TreeWork(const TreeTensorNetwork& ttn, const BondHamiltonian& h) : ttn_(ttn) {
    const std::size_t d = ttn.phys_dim();
    if (h.phys_dim != d || h.length() != ttn.length()) {
      throw ArgumentError("TTN: Hamiltonian does not match the tree");
    }
    bottom_.one.assign(ttn.length(), Matrix::Zero(d, d));
    for (std::size_t i = 0; i < h.terms.size(); ++i) {
      bottom_.two.push_back(h.bond_matrix(i));
    }
  }

  // Shifts every bond term by its largest eigenvalue so each is <= 0, and
  // returns the total shift.
  double shift_terms() {
    double shift = 0.0;
    for (Matrix& m : bottom_.two) {
      const double top = linalg::hermitian_eig(m).values[0];
      m -= top * Matrix::Identity(m.rows(), m.cols());
      shift += top;
    }
    return shift;
  }

  const LevelOperators& bottom() const { return bottom_; }

  // Operators on level t from those on level t-1.
  LevelOperators ascend(const LevelOperators& below, std::size_t t) const {
    const auto& tensors = ttn_.layer(t);
    LevelOperators up;
    for (std::size_t p = 0; p < tensors.size(); ++p) {
      const Matrix w = tensors[p].matrix(1);
      const Matrix k = in_parent(below.one[2 * p], below.one[2 * p + 1],
                                 below.two[2 * p]);
      up.one.push_back(w.conjugate() * k * w.transpose());
    }
    for (std::size_t p = 0; p + 1 < tensors.size(); ++p) {
      const Tensor& w0 = tensors[p];
      const Tensor& w1 = tensors[p + 1];
      const Tensor b = Tensor::from_matrix(
          below.two[2 * p + 1],
          {w0.extent(2), w1.extent(1), w0.extent(2), w1.extent(1)});
      const Tensor y = contract(right_gram(w0), b, {{2, 0}, {3, 2}});  // a a' l l'
      const Tensor z = contract(y, left_gram(w1), {{2, 2}, {3, 3}});   // a a' c c'
      up.two.push_back(z.permute({0, 2, 1, 3}).matrix(2));
    }
    return up;
  }

  LevelOperators ascend_to_top() const {
    LevelOperators level = bottom_;
    for (std::size_t t = 1; t < ttn_.depth(); ++t) level = ascend(level, t);
    return level;
  }

  static Matrix top_operator(const LevelOperators& level) {
    return in_parent(level.one[0], level.one[1], level.two[0]);
  }

  // Reduced states on every level, top-down; states[t] is level t.
  std::vector<LevelStates> descend() const {
    const std::size_t depth = ttn_.depth();
    std::vector<LevelStates> states(depth);
    const Matrix top = ttn_.top().matrix();
    const Vector v = ttn_.top().vector();
    states[depth - 1].one = {top * top.adjoint(),
                             top.transpose() * top.conjugate()};
    states[depth - 1].two = {v * v.adjoint()};
    for (std::size_t t = depth - 1; t >= 1; --t) {
      const LevelStates& up = states[t];
      LevelStates& down = states[t - 1];
      const auto& tensors = ttn_.layer(t);
      const std::size_t n = tensors.size();
      down.one.resize(2 * n);
      down.two.resize(2 * n - 1);
      for (std::size_t p = 0; p < n; ++p) {
        const Tensor& w = tensors[p];
        const Matrix wm = w.matrix(1);
        const Matrix pair = wm.transpose() * up.one[p] * wm.conjugate();
        down.two[2 * p] = pair;
        down.one[2 * p] = trace_right(pair, w.extent(1), w.extent(2));
        down.one[2 * p + 1] = trace_left(pair, w.extent(1), w.extent(2));
      }
      for (std::size_t p = 0; p + 1 < n; ++p) {
        const Tensor& w0 = tensors[p];
        const Tensor& w1 = tensors[p + 1];
        const Tensor rho = as4(up.two[p], w0.extent(0), w1.extent(0));
        const Tensor y = contract(rho, right_gram(w0).conj(), {{0, 0}, {2, 1}});
        const Tensor z = contract(y, left_gram(w1).conj(), {{0, 0}, {1, 1}});
        down.two[2 * p + 1] = z.permute({0, 2, 1, 3}).matrix(2);
      }
    }
    return states;
  }

 private:
  const TreeTensorNetwork& ttn_;
  LevelOperators bottom_;
};

double quadratic_form(const Tensor& top, const Matrix& h) {
  const Vector v = top.vector();
  return v.dot(h * v).real();
}

// Derivative of the local energy with respect to conj(w) for tensor (t, p),
// given operators on level t-1 and reduced states on level t.
Tensor environment(const TreeTensorNetwork& ttn, std::size_t t, std::size_t p,
                   const LevelOperators& below, const LevelStates& states,
                   const std::vector<Tensor>& ql, const std::vector<Tensor>& qr) {
  const auto& tensors = ttn.layer(t);
  const Tensor& w = tensors[p];
  const Matrix wm = w.matrix(1);
  const Matrix k = in_parent(below.one[2 * p], below.one[2 * p + 1],
                             below.two[2 * p]);
  Tensor env = Tensor::from_matrix(states.one[p].transpose() * wm * k.transpose(),
                                   w.shape());
  auto accumulate = [&env](const Tensor& term) {
    auto out = env.data();
    auto in = term.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += in[i];
  };
  if (p + 1 < tensors.size()) {
    // Term on (right child of p, left child of p+1).
    const Tensor& w1 = tensors[p + 1];
    const Tensor rho = as4(states.two[p], w.extent(0), w1.extent(0));
    const Tensor b = Tensor::from_matrix(
        below.two[2 * p + 1],
        {w.extent(2), w1.extent(1), w.extent(2), w1.extent(1)});
    const Tensor n = contract(rho, ql[p + 1], {{3, 0}, {1, 1}});  // a' a l2 l2'
    const Tensor m = contract(n, b, {{2, 1}, {3, 3}});            // a' a r r'
    accumulate(contract(m, w, {{0, 0}, {3, 2}}).permute({0, 2, 1}));
  }
  if (p > 0) {
    // Term on (right child of p-1, left child of p).
    const Tensor& w0 = tensors[p - 1];
    const Tensor rho = as4(states.two[p - 1], w0.extent(0), w.extent(0));
    const Tensor b = Tensor::from_matrix(
        below.two[2 * p - 1],
        {w0.extent(2), w.extent(1), w0.extent(2), w.extent(1)});
    const Tensor n = contract(rho, qr[p - 1], {{2, 0}, {0, 1}});  // a' a r1 r1'
    const Tensor m = contract(n, b, {{2, 0}, {3, 2}});            // a' a l l'
    accumulate(contract(m, w, {{0, 0}, {3, 1}}));
  }
  return env;
}

}  // namespace

double ttn_energy(const TreeTensorNetwork& ttn, const BondHamiltonian& h) {
  const TreeWork work(ttn, h);
  return quadratic_form(ttn.top(), TreeWork::top_operator(work.ascend_to_top()));
}

TtnOptimizeResult optimize_ground_state(TreeTensorNetwork ttn,
                                        const BondHamiltonian& h,
                                        const TtnOptimizeOptions& options) {
  TreeWork work(ttn, h);
  TtnOptimizeResult result{ttn, {}};
  result.energies.push_back(ttn_energy(ttn, h));
  const double shift = work.shift_terms();
  const std::size_t depth = ttn.depth();

  for (std::size_t sweep = 1; sweep <= options.sweeps; ++sweep) {
    const std::vector<LevelStates> states = work.descend();
    LevelOperators level = work.bottom();
    for (std::size_t t = 1; t < depth; ++t) {
      const std::size_t n = ttn.layer(t).size();
      std::vector<Tensor> ql, qr;
      for (const Tensor& w : ttn.layer(t)) {
        ql.push_back(left_gram(w));
        qr.push_back(right_gram(w));
      }
      for (std::size_t p = 0; p < n; ++p) {
        const Tensor env = environment(ttn, t, p, level, states[t], ql, qr);
        if (!(env.max_abs() > 0.0)) continue;
        const Matrix g = env.matrix(1);
        const Matrix w = linalg::polar_isometry(-g);
        ttn.set_isometry(t, p, Tensor::from_matrix(w, env.shape()));
        ql[p] = left_gram(ttn.isometry(t, p));
        qr[p] = right_gram(ttn.isometry(t, p));
      }
      level = work.ascend(level, t);
    }
    // The top tensor is the lowest eigenvector of the coarse-grained
    // Hamiltonian; it is only replaced when that lowers the energy.
    const Matrix top_h = TreeWork::top_operator(level);
    double energy = quadratic_form(ttn.top(), top_h);
    const linalg::Eig eig = linalg::hermitian_eig(top_h);
    const Eigen::Index lowest = eig.values.size() - 1;
    if (eig.values[lowest] < energy) {
      Tensor top = Tensor::from_matrix(eig.vectors.col(lowest), ttn.top().shape());
      // Normalize exactly.
      const double norm = top.frobenius_norm();
      for (auto& x : top.data()) x /= norm;
      ttn.set_top(std::move(top));
      energy = eig.values[lowest];
    }
    result.energies.push_back(energy + shift);
    if (options.observer) options.observer({sweep, energy + shift}, ttn);
  }
  result.state = std::move(ttn);
  return result;
}

}  // namespace subfid
