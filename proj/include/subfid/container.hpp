#pragma once

#include <filesystem>
#include <variant>

#include "subfid/mps.hpp"
#include "subfid/ttn.hpp"

namespace subfid {

// On-disk network container: a directory holding manifest.json and one
// binary file per tensor (little-endian float64 pairs (re, im), row-major).
//
// manifest.json fields: format_version (1), kind ("mps" | "ttn"),
// length (mps) or depth (ttn), phys_dim, bond_dims, dtype ("c128") and a
// tensor table mapping each tensor name to its file, shape and axis order.
// MPS tensors are gamma_<n> with axes (left, phys, right) and S_<b> for
// bonds b = 0 .. L in ascending order; TTN tensors are w_<t>_<p> with axes
// (top, left_child, right_child) and the rank-2 top.
inline constexpr int kContainerVersion = 1;

using Network = std::variant<MatrixProductState, TreeTensorNetwork>;

// Creates the directory if needed and overwrites an existing container.
void save_network(const std::filesystem::path& dir, const MatrixProductState& state);
void save_network(const std::filesystem::path& dir, const TreeTensorNetwork& state);
void save_network(const std::filesystem::path& dir, const Network& state);

// Throws LoadError on a missing or corrupt manifest, a version mismatch, or
// tensors inconsistent with their declared shapes.
Network load_network(const std::filesystem::path& dir);
MatrixProductState load_mps(const std::filesystem::path& dir);
TreeTensorNetwork load_ttn(const std::filesystem::path& dir);

}  // namespace subfid
