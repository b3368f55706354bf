#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "subfid/fidelity_mps.hpp"
#include "subfid/hamiltonian.hpp"
#include "subfid/tensor.hpp"

namespace subfid {

// Perfect binary tree over L = 2^depth sites.
//
// Layer t = 1 .. depth-1 holds L / 2^t isometries w with axes
// (top, left child, right child), normalized over the children:
//
//   sum_{l,r} w[a,l,r] conj(w[a',l,r]) = delta(a,a').
//
// Tensor p of layer t coarse-grains sites [p 2^t, (p+1) 2^t). The rank-2 top
// tensor joins the two layer-(depth-1) tensors and carries the norm:
//
//   |psi> = sum_{a,b} top[a,b] |phi_a^left> |phi_b^right>.
//
// Layer 0 is the physical level; bond_dim(0) is phys_dim.
class TreeTensorNetwork {
 public:
  TreeTensorNetwork(std::size_t phys_dim, std::vector<std::vector<Tensor>> layers,
                    Tensor top);

  std::size_t depth() const { return layers_.size() + 1; }
  std::size_t length() const { return std::size_t{1} << depth(); }
  std::size_t phys_dim() const { return phys_dim_; }
  // Extent of the upward leg of layer-t tensors (t = 0 .. depth-1).
  std::size_t bond_dim(std::size_t layer) const;
  std::size_t max_bond_dim() const;

  // t = 1 .. depth-1.
  const std::vector<Tensor>& layer(std::size_t t) const;
  const Tensor& isometry(std::size_t t, std::size_t p) const;
  const Tensor& top() const { return top_; }

  // Replacements must keep the bond extents.
  void set_isometry(std::size_t t, std::size_t p, Tensor w);
  void set_top(Tensor top);

  friend bool operator==(const TreeTensorNetwork&,
                         const TreeTensorNetwork&) = default;

 private:
  void validate() const;

  std::size_t phys_dim_ = 0;
  std::vector<std::vector<Tensor>> layers_;
  Tensor top_;
};

// chi_t = min(chi, chi_{t-1}^2) with chi_0 = phys_dim.
TreeTensorNetwork random_ttn(std::size_t depth, std::size_t chi,
                             std::size_t phys_dim, std::uint64_t seed);

// Product state from one vector per site (normalized internally).
TreeTensorNetwork product_ttn(const std::vector<Vector>& site_vectors);

// Worst isometricity residual over all tensors, and |1 - |top|_F|.
double isometry_residual(const TreeTensorNetwork& ttn);

// A subtree: tensor p of layer t, covering sites [x0, x1).
struct Branch {
  std::size_t layer = 0;
  std::size_t position = 0;
  std::size_t x0 = 0;
  std::size_t x1 = 0;

  std::size_t size() const { return x1 - x0; }
  friend bool operator==(const Branch&, const Branch&) = default;
};

// All subtrees below the top, layer by layer: L/2 + L/4 + ... + 2 entries.
// Single sites are not branches of their own (they are cut by a physical
// leg, not a bond) and the full system is not a subsystem.
std::vector<Branch> branch_regions(const TreeTensorNetwork& ttn);
std::vector<Branch> branch_regions(std::size_t depth);

// Reduced state on the upward leg of the branch tensor.
Tensor branch_environment(const TreeTensorNetwork& ttn, const Branch& branch);

FidelityReport branch_fidelity(const TreeTensorNetwork& a,
                               const TreeTensorNetwork& b,
                               const Branch& branch);

double ttn_energy(const TreeTensorNetwork& ttn, const BondHamiltonian& h);

struct TtnSweep {
  std::size_t sweep = 0;
  double energy = 0.0;
};

struct TtnOptimizeOptions {
  std::size_t sweeps = 50;
  // Called after every sweep with the current network; the network passed in
  // is a snapshot the observer may copy.
  std::function<void(const TtnSweep&, const TreeTensorNetwork&)> observer;
};

struct TtnOptimizeResult {
  TreeTensorNetwork state;
  std::vector<double> energies;  // energies[0] is the input energy
};

TtnOptimizeResult optimize_ground_state(TreeTensorNetwork ttn,
                                        const BondHamiltonian& h,
                                        const TtnOptimizeOptions& options);

}  // namespace subfid
