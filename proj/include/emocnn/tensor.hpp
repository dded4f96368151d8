// Dense rank 1-3 tensors over Eigen storage.
#pragma once

#include <algorithm>
#include <cstring>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace emocnn {

using Index = Eigen::Index;
using Shape = std::vector<Index>;

inline std::string shape_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Row-major dense tensor. Rank-2 tensors view as matrices; rank-3 tensors
/// view as a stack of matrices along the first axis.
template <typename Scalar_>
class Tensor {
 public:
  using Scalar = Scalar_;
  using MatrixMap = Eigen::Map<RowMatrix<Scalar>>;
  using ConstMatrixMap = Eigen::Map<const RowMatrix<Scalar>>;
  using VectorMap = Eigen::Map<Vector<Scalar>>;
  using ConstVectorMap = Eigen::Map<const Vector<Scalar>>;

  Tensor() = default;

  /// Zero-filled.
  explicit Tensor(Shape shape) : shape_(std::move(shape)) {
    if (shape_.empty() || shape_.size() > 3) {
      throw std::invalid_argument("tensor rank must be 1..3, got " + std::to_string(shape_.size()));
    }
    for (Index d : shape_) {
      if (d < 0) throw std::invalid_argument("negative tensor dimension");
    }
    data_ = Vector<Scalar>::Zero(product(shape_));
  }

  Tensor(Shape shape, std::initializer_list<Scalar> values) : Tensor(std::move(shape)) {
    if (static_cast<Index>(values.size()) != data_.size()) {
      throw std::invalid_argument("tensor initializer size does not match shape " + shape_string(shape_));
    }
    std::copy(values.begin(), values.end(), data_.data());
  }

  /// Rank-2 tensor copied from any Eigen matrix expression.
  template <typename Derived>
  static Tensor from_matrix(const Eigen::MatrixBase<Derived>& m) {
    Tensor t({m.rows(), m.cols()});
    t.matrix() = m;
    return t;
  }

  /// Rank-1 tensor copied from any Eigen vector expression.
  template <typename Derived>
  static Tensor from_vector(const Eigen::MatrixBase<Derived>& v) {
    Tensor t({v.size()});
    t.flat() = v;
    return t;
  }

  const Shape& shape() const { return shape_; }
  Index rank() const { return static_cast<Index>(shape_.size()); }
  Index dim(Index axis) const { return shape_.at(static_cast<std::size_t>(axis)); }
  Index size() const { return data_.size(); }
  bool empty() const { return shape_.empty(); }

  Scalar* data() { return data_.data(); }
  const Scalar* data() const { return data_.data(); }
  std::span<Scalar> values() { return {data_.data(), static_cast<std::size_t>(data_.size())}; }
  std::span<const Scalar> values() const {
    return {data_.data(), static_cast<std::size_t>(data_.size())};
  }

  Vector<Scalar>& flat() { return data_; }
  const Vector<Scalar>& flat() const { return data_; }

  MatrixMap matrix() {
    require_rank(2);
    return MatrixMap(data_.data(), shape_[0], shape_[1]);
  }
  ConstMatrixMap matrix() const {
    require_rank(2);
    return ConstMatrixMap(data_.data(), shape_[0], shape_[1]);
  }

  /// Matrix `k` of a rank-3 tensor: dims 1 x 2.
  MatrixMap slice(Index k) {
    require_rank(3);
    return MatrixMap(data_.data() + k * shape_[1] * shape_[2], shape_[1], shape_[2]);
  }
  ConstMatrixMap slice(Index k) const {
    require_rank(3);
    return ConstMatrixMap(data_.data() + k * shape_[1] * shape_[2], shape_[1], shape_[2]);
  }

  Scalar& operator()(Index i) { return data_[i]; }
  Scalar operator()(Index i) const { return data_[i]; }
  Scalar& operator()(Index i, Index j) { return data_[i * shape_[1] + j]; }
  Scalar operator()(Index i, Index j) const { return data_[i * shape_[1] + j]; }
  Scalar& operator()(Index i, Index j, Index k) { return data_[(i * shape_[1] + j) * shape_[2] + k]; }
  Scalar operator()(Index i, Index j, Index k) const {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }

  void set_zero() { data_.setZero(); }

  /// Validation pass: false if any element is NaN or infinite.
  bool all_finite() const { return data_.allFinite(); }

  /// Same shape and identical bit patterns.
  bool bitwise_equal(const Tensor& other) const {
    return shape_ == other.shape_ &&
           std::memcmp(data_.data(), other.data_.data(),
                       static_cast<std::size_t>(data_.size()) * sizeof(Scalar)) == 0;
  }

  template <typename Other>
  Tensor<Other> cast() const {
    Tensor<Other> out(shape_);
    out.flat() = data_.template cast<Other>();
    return out;
  }

 private:
  static Index product(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), Index{1}, std::multiplies<>());
  }

  void require_rank(std::size_t r) const {
    if (shape_.size() != r) {
      throw std::logic_error("expected rank-" + std::to_string(r) + " tensor, got shape " +
                             shape_string(shape_));
    }
  }

  Shape shape_;
  Vector<Scalar> data_;
};

}  // namespace emocnn
