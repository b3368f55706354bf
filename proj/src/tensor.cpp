#include "subfid/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "subfid/errors.hpp"

namespace subfid {

std::size_t volume(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

Tensor::Tensor(Shape shape)
    : shape_(std::move(shape)), data_(volume(shape_), cplx{0.0, 0.0}) {
  for (auto e : shape_) {
    if (e == 0) throw ArgumentError("Tensor: extents must be positive");
  }
}

Tensor::Tensor(Shape shape, std::vector<cplx> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  for (auto e : shape_) {
    if (e == 0) throw ArgumentError("Tensor: extents must be positive");
  }
  if (data_.size() != volume(shape_)) {
    throw DimensionError("Tensor: data length " +
                         std::to_string(data_.size()) +
                         " does not match shape volume " +
                         std::to_string(volume(shape_)));
  }
}

Tensor Tensor::scalar(cplx value) { return Tensor(Shape{}, {value}); }

Tensor Tensor::identity(std::size_t n) {
  Tensor t({n, n});
  for (std::size_t i = 0; i < n; ++i) t.data_[i * n + i] = 1.0;
  return t;
}

Tensor Tensor::from_matrix(const Matrix& m) {
  return from_matrix(m, {static_cast<std::size_t>(m.rows()),
                         static_cast<std::size_t>(m.cols())});
}

Tensor Tensor::from_matrix(const Matrix& m, Shape shape) {
  if (static_cast<std::size_t>(m.size()) != volume(shape)) {
    throw DimensionError("Tensor::from_matrix: size mismatch");
  }
  std::vector<cplx> data(m.size());
  Eigen::Map<RowMatrix>(data.data(), m.rows(), m.cols()) = m;
  return Tensor(std::move(shape), std::move(data));
}

Tensor Tensor::from_vector(const Vector& v) {
  return Tensor({static_cast<std::size_t>(v.size())},
                std::vector<cplx>(v.data(), v.data() + v.size()));
}

std::size_t Tensor::extent(std::size_t axis) const {
  if (axis >= shape_.size()) throw ArgumentError("Tensor: axis out of range");
  return shape_[axis];
}

std::size_t Tensor::offset(std::initializer_list<std::size_t> index) const {
  if (index.size() != shape_.size()) {
    throw ArgumentError("Tensor: index rank mismatch");
  }
  std::size_t off = 0;
  std::size_t axis = 0;
  for (auto i : index) {
    if (i >= shape_[axis]) throw ArgumentError("Tensor: index out of range");
    off = off * shape_[axis] + i;
    ++axis;
  }
  return off;
}

cplx& Tensor::operator()(std::initializer_list<std::size_t> index) {
  return data_[offset(index)];
}

cplx Tensor::operator()(std::initializer_list<std::size_t> index) const {
  return data_[offset(index)];
}

Tensor Tensor::reshape(Shape shape) const {
  if (volume(shape) != data_.size()) {
    throw DimensionError("Tensor::reshape: volume mismatch");
  }
  return Tensor(std::move(shape), data_);
}

Tensor Tensor::permute(std::span<const std::size_t> perm) const {
  const std::size_t r = rank();
  if (perm.size() != r) throw ArgumentError("Tensor::permute: rank mismatch");
  std::vector<bool> seen(r, false);
  for (auto p : perm) {
    if (p >= r || seen[p]) {
      throw ArgumentError("Tensor::permute: not a permutation");
    }
    seen[p] = true;
  }
  if (std::is_sorted(perm.begin(), perm.end())) return *this;

  Shape new_shape(r);
  for (std::size_t i = 0; i < r; ++i) new_shape[i] = shape_[perm[i]];

  std::vector<std::size_t> old_stride(r, 1);
  for (std::size_t i = r; i-- > 1;) {
    old_stride[i - 1] = old_stride[i] * shape_[i];
  }
  // Strides of the source tensor expressed in the new axis order.
  std::vector<std::size_t> stride(r);
  for (std::size_t i = 0; i < r; ++i) stride[i] = old_stride[perm[i]];

  std::vector<cplx> out(data_.size());
  std::vector<std::size_t> counter(r, 0);
  std::size_t src = 0;
  for (std::size_t dst = 0; dst < out.size(); ++dst) {
    out[dst] = data_[src];
    for (std::size_t i = r; i-- > 0;) {
      if (++counter[i] < new_shape[i]) {
        src += stride[i];
        break;
      }
      src -= stride[i] * (new_shape[i] - 1);
      counter[i] = 0;
    }
  }
  return Tensor(std::move(new_shape), std::move(out));
}

Tensor Tensor::conj() const {
  Tensor t = *this;
  for (auto& x : t.data_) x = std::conj(x);
  return t;
}

Matrix Tensor::matrix(std::size_t row_axes) const {
  if (row_axes > rank()) throw ArgumentError("Tensor::matrix: bad split");
  std::size_t rows = 1;
  for (std::size_t i = 0; i < row_axes; ++i) rows *= shape_[i];
  return row_view(rows, data_.size() / rows);
}

Matrix Tensor::matrix() const {
  if (rank() != 2) throw ArgumentError("Tensor::matrix: expected rank 2");
  return matrix(1);
}

Vector Tensor::vector() const {
  return Eigen::Map<const Vector>(data_.data(), data_.size());
}

Eigen::Map<const RowMatrix> Tensor::row_view(std::size_t rows,
                                             std::size_t cols) const {
  if (rows * cols != data_.size()) {
    throw DimensionError("Tensor::row_view: size mismatch");
  }
  return Eigen::Map<const RowMatrix>(data_.data(), rows, cols);
}

double Tensor::max_abs() const {
  double m = 0.0;
  for (auto x : data_) m = std::max(m, std::abs(x));
  return m;
}

double Tensor::frobenius_norm() const {
  double s = 0.0;
  for (auto x : data_) s += std::norm(x);
  return std::sqrt(s);
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](cplx x) {
    return std::isfinite(x.real()) && std::isfinite(x.imag());
  });
}

Tensor contract(const Tensor& a, const Tensor& b,
                std::span<const AxisPair> axis_pairs) {
  const std::size_t ra = a.rank();
  const std::size_t rb = b.rank();
  std::vector<bool> used_a(ra, false);
  std::vector<bool> used_b(rb, false);
  for (auto [ia, ib] : axis_pairs) {
    if (ia >= ra || ib >= rb) {
      throw ArgumentError("contract: axis out of range");
    }
    if (used_a[ia] || used_b[ib]) {
      throw ArgumentError("contract: repeated axis in pairs");
    }
    used_a[ia] = used_b[ib] = true;
    if (a.extent(ia) != b.extent(ib)) {
      throw DimensionError("contract: extent mismatch on axes (" +
                           std::to_string(ia) + ", " + std::to_string(ib) +
                           "): " + std::to_string(a.extent(ia)) + " vs " +
                           std::to_string(b.extent(ib)));
    }
  }

  std::vector<std::size_t> perm_a;
  std::vector<std::size_t> perm_b;
  Shape out_shape;
  std::size_t free_a = 1;
  std::size_t free_b = 1;
  std::size_t inner = 1;
  for (std::size_t i = 0; i < ra; ++i) {
    if (!used_a[i]) {
      perm_a.push_back(i);
      out_shape.push_back(a.extent(i));
      free_a *= a.extent(i);
    }
  }
  for (auto [ia, ib] : axis_pairs) {
    perm_a.push_back(ia);
    perm_b.push_back(ib);
    inner *= a.extent(ia);
  }
  for (std::size_t i = 0; i < rb; ++i) {
    if (!used_b[i]) {
      perm_b.push_back(i);
      out_shape.push_back(b.extent(i));
      free_b *= b.extent(i);
    }
  }

  const Tensor ap = a.permute(perm_a);
  const Tensor bp = b.permute(perm_b);
  std::vector<cplx> out(free_a * free_b);
  Eigen::Map<RowMatrix>(out.data(), free_a, free_b).noalias() =
      ap.row_view(free_a, inner) * bp.row_view(inner, free_b);
  Tensor result(std::move(out_shape), std::move(out));
  if (!result.all_finite()) {
    throw NumericError("contract: non-finite entries in result");
  }
  return result;
}

Tensor contract(const Tensor& a, const Tensor& b,
                std::initializer_list<AxisPair> axis_pairs) {
  return contract(a, b,
                  std::span<const AxisPair>(axis_pairs.begin(),
                                            axis_pairs.size()));
}

}  // namespace subfid
