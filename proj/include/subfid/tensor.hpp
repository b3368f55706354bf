#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace subfid {

using cplx = std::complex<double>;
using Shape = std::vector<std::size_t>;

// Column-major dense matrix, the working type for all decompositions.
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Row-major view type matching Tensor storage.
using RowMatrix =
    Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Dense complex tensor stored row-major: the last axis varies fastest.
// Tensors are values; every transforming operation returns a new tensor.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape);
  Tensor(Shape shape, std::vector<cplx> data);

  static Tensor scalar(cplx value);
  static Tensor identity(std::size_t n);
  // Rank-2 tensor with the entries of m.
  static Tensor from_matrix(const Matrix& m);
  // Tensor of the given shape filled from m read row-major; m.size() must
  // match the shape's volume.
  static Tensor from_matrix(const Matrix& m, Shape shape);
  static Tensor from_vector(const Vector& v);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t extent(std::size_t axis) const;
  std::size_t size() const { return data_.size(); }

  std::span<const cplx> data() const { return data_; }
  std::span<cplx> data() { return data_; }

  cplx& operator()(std::initializer_list<std::size_t> index);
  cplx operator()(std::initializer_list<std::size_t> index) const;

  Tensor reshape(Shape shape) const;
  Tensor permute(std::span<const std::size_t> perm) const;
  Tensor permute(std::initializer_list<std::size_t> perm) const {
    return permute(std::span<const std::size_t>(perm.begin(), perm.size()));
  }
  Tensor conj() const;

  // Groups the first `row_axes` axes into rows and the rest into columns.
  Matrix matrix(std::size_t row_axes) const;
  // Rank-2 shortcut.
  Matrix matrix() const;
  Vector vector() const;

  Eigen::Map<const RowMatrix> row_view(std::size_t rows,
                                       std::size_t cols) const;

  double max_abs() const;
  double frobenius_norm() const;
  bool all_finite() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::size_t offset(std::initializer_list<std::size_t> index) const;

  Shape shape_;
  std::vector<cplx> data_;
};

using AxisPair = std::pair<std::size_t, std::size_t>;

// Contracts the listed axis pairs (axis of a, axis of b). Result axes are the
// unpaired axes of a followed by those of b, each in their original order.
Tensor contract(const Tensor& a, const Tensor& b,
                std::span<const AxisPair> axis_pairs);
Tensor contract(const Tensor& a, const Tensor& b,
                std::initializer_list<AxisPair> axis_pairs);

std::size_t volume(const Shape& shape);

double max_abs(const Matrix& m);

}  // namespace subfid
