#include "subfid/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <unsupported/Eigen/KroneckerProduct>

#include "subfid/errors.hpp"
#include "subfid/linalg.hpp"

namespace subfid {

Matrix BondHamiltonian::bond_matrix(std::size_t i) const {
  if (i >= terms.size()) throw ArgumentError("bond_matrix: bond out of range");
  return terms[i].matrix(2);
}

bool BondHamiltonian::is_zero() const {
  return std::all_of(terms.begin(), terms.end(),
                     [](const Tensor& t) { return t.max_abs() == 0.0; });
}

BondHamiltonian zero_hamiltonian(std::size_t length, std::size_t phys_dim) {
  if (length < 2) throw ArgumentError("zero_hamiltonian: length must be >= 2");
  BondHamiltonian h;
  h.phys_dim = phys_dim;
  h.terms.assign(length - 1, Tensor({phys_dim, phys_dim, phys_dim, phys_dim}));
  return h;
}

Matrix pauli_x() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = m(1, 0) = 1.0;
  return m;
}

Matrix pauli_y() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = cplx(0.0, -1.0);
  m(1, 0) = cplx(0.0, 1.0);
  return m;
}

Matrix pauli_z() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

BondHamiltonian ising_terms(const IsingSpec& spec) {
  if (spec.length < 2) throw ArgumentError("ising_terms: length must be >= 2");
  if (!(spec.h >= 0.0)) throw ArgumentError("ising_terms: h must be >= 0");
  const std::size_t len = spec.length;
  const Matrix id = Matrix::Identity(2, 2);
  const double offset = spec.include_offset ? 4.0 / (2.0 * std::numbers::pi) : 0.0;
  const Matrix site = -0.5 * (spec.h * pauli_z() - offset * id);
  const Matrix xx = Eigen::kroneckerProduct(pauli_x(), pauli_x());

  BondHamiltonian h;
  h.phys_dim = 2;
  for (std::size_t i = 0; i + 1 < len; ++i) {
    const double wl = i == 0 ? 1.0 : 0.5;
    const double wr = i + 2 == len ? 1.0 : 0.5;
    const Matrix term = -0.5 * xx + wl * Eigen::kroneckerProduct(site, id) +
                        wr * Eigen::kroneckerProduct(id, site);
    h.terms.push_back(Tensor::from_matrix(term, {2, 2, 2, 2}));
  }
  return h;
}

Eigen::SparseMatrix<cplx> sparse_hamiltonian(const BondHamiltonian& h) {
  const std::size_t len = h.length();
  const std::size_t d = h.phys_dim;
  std::size_t dim = 1;
  for (std::size_t i = 0; i < len; ++i) {
    dim *= d;
    if (dim > (std::size_t{1} << 20)) {
      throw CapacityError("sparse_hamiltonian: chain too long");
    }
  }
  std::vector<Eigen::Triplet<cplx>> entries;
  for (std::size_t i = 0; i + 1 < len; ++i) {
    const Matrix term = h.bond_matrix(i);
    // Index = (high, s1, s2, low) with high over sites < i.
    std::size_t low = 1;
    for (std::size_t k = i + 2; k < len; ++k) low *= d;
    const std::size_t high = dim / (low * d * d);
    for (std::size_t a = 0; a < high; ++a) {
      for (std::size_t p = 0; p < d * d; ++p) {
        for (std::size_t q = 0; q < d * d; ++q) {
          const cplx v = term(p, q);
          if (v == cplx(0.0)) continue;
          for (std::size_t c = 0; c < low; ++c) {
            const std::size_t row = (a * d * d + p) * low + c;
            const std::size_t col = (a * d * d + q) * low + c;
            entries.emplace_back(row, col, v);
          }
        }
      }
    }
  }
  Eigen::SparseMatrix<cplx> out(dim, dim);
  out.setFromTriplets(entries.begin(), entries.end());
  return out;
}

Matrix dense_hamiltonian(const BondHamiltonian& h) {
  const Eigen::SparseMatrix<cplx> s = sparse_hamiltonian(h);
  if (s.rows() > 1024) throw CapacityError("dense_hamiltonian: chain too long");
  return Matrix(s);
}

GroundState exact_ground_state(const BondHamiltonian& h) {
  const Eigen::SparseMatrix<cplx> op = sparse_hamiltonian(h);
  const Eigen::Index dim = op.rows();
  if (dim <= 256) {
    const linalg::Eig eig = linalg::hermitian_eig(Matrix(op));
    const Eigen::Index last = dim - 1;
    return {eig.values[last], eig.vectors.col(last)};
  }
  std::mt19937_64 rng(1);
  const Eigen::Index max_iter = std::min<Eigen::Index>(dim, 400);
  std::vector<Vector> basis;
  std::vector<double> alpha, beta;
  Vector v = linalg::random_gaussian(dim, 1, rng);
  v.normalize();
  double previous = std::numeric_limits<double>::infinity();
  GroundState out;
  for (Eigen::Index k = 0; k < max_iter; ++k) {
    basis.push_back(v);
    Vector w = op * v;
    alpha.push_back(v.dot(w).real());
    // Full reorthogonalization, twice for stability.
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vector& b : basis) w -= b.dot(w) * b;
    }
    const double nb = w.norm();
    const bool exhausted = nb < 1e-12 || k + 1 == max_iter;
    if (!exhausted && k % 10 != 9) {
      beta.push_back(nb);
      v = w / nb;
      continue;
    }

    const Eigen::Index m = static_cast<Eigen::Index>(alpha.size());
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      tri(i, i) = alpha[i];
      if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
    const double e0 = es.eigenvalues()[0];
    const bool converged =
        std::abs(e0 - previous) < 1e-14 * std::max(1.0, std::abs(e0));
    if (converged || exhausted) {
      Vector g = Vector::Zero(dim);
      for (Eigen::Index i = 0; i < m; ++i) {
        g += es.eigenvectors()(i, 0) * basis[i];
      }
      g.normalize();
      out.vector = g;
      out.energy = (g.dot(op * g)).real();
      return out;
    }
    previous = e0;
    beta.push_back(nb);
    v = w / nb;
  }
  return out;
}

double ising_free_fermion_energy(const IsingSpec& spec) {
  const std::size_t len = spec.length;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(len, len);
  for (std::size_t i = 0; i < len; ++i) {
    m(i, i) = spec.h;
    if (i + 1 < len) m(i, i + 1) = 1.0;
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  double e = -0.5 * svd.singularValues().sum();
  if (spec.include_offset) e += static_cast<double>(len) / std::numbers::pi;
  return e;
}

}  // namespace subfid
