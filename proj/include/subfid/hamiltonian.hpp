#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/SparseCore>

#include "subfid/tensor.hpp"

namespace subfid {

// Nearest-neighbour Hamiltonian H = sum_i h_i, h_i acting on (i, i+1) with
// axes (out1, out2, in1, in2).
struct BondHamiltonian {
  std::size_t phys_dim = 2;
  std::vector<Tensor> terms;

  std::size_t length() const { return terms.size() + 1; }
  // Term i as a (d*d) x (d*d) matrix.
  Matrix bond_matrix(std::size_t i) const;
  bool is_zero() const;
};

// Zero Hamiltonian on `length` sites.
BondHamiltonian zero_hamiltonian(std::size_t length, std::size_t phys_dim);

// H = -1/2 sum_i (X_i X_{i+1} + h Z_i - (4 / 2 pi) 1) on an open chain.
struct IsingSpec {
  double h = 1.0;
  std::size_t length = 2;
  bool include_offset = true;
};

// Each site term -1/2 (h Z_i - 4/(2 pi)) is split half-and-half onto the two
// adjacent bonds; the edge sites put their whole share on their only bond.
BondHamiltonian ising_terms(const IsingSpec& spec);

// Pauli matrices in the computational basis |0>, |1> with Z|0> = |0>.
Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

// Full operator on d^L amplitudes, site 0 most significant.
Eigen::SparseMatrix<cplx> sparse_hamiltonian(const BondHamiltonian& h);
// Dense form; only for small chains (d^L <= 1024).
Matrix dense_hamiltonian(const BondHamiltonian& h);

struct GroundState {
  double energy = 0.0;
  Vector vector;
};

// Lowest eigenpair by Lanczos with full reorthogonalization.
GroundState exact_ground_state(const BondHamiltonian& h);

// Closed-form ground energy of the open Ising chain via its free-fermion
// single-particle spectrum.
double ising_free_fermion_energy(const IsingSpec& spec);

}  // namespace subfid
