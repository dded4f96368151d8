// Forward and backward kernels for the 1D text CNN. Backward functions that
// produce parameter gradients accumulate into the caller's tensors.
#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "emocnn/tensor.hpp"

namespace emocnn {

namespace detail {

inline void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Embedding

/// Row i of the result is row ids[i] of `table` (ids x dim).
template <typename Scalar>
Tensor<Scalar> embedding_forward(std::span<const int> ids, const Tensor<Scalar>& table) {
  detail::require(table.rank() == 2, "embedding table must be rank 2");
  const Index rows = table.dim(0);
  Tensor<Scalar> out({static_cast<Index>(ids.size()), table.dim(1)});
  auto out_m = out.matrix();
  const auto table_m = table.matrix();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= rows) {
      throw std::out_of_range("embedding id " + std::to_string(ids[i]) + " outside vocabulary of " +
                              std::to_string(rows));
    }
    out_m.row(static_cast<Index>(i)) = table_m.row(ids[i]);
  }
  return out;
}

/// Scatter-adds output-row gradients into the referenced table rows.
template <typename Scalar>
void embedding_backward(std::span<const int> ids, const Tensor<Scalar>& grad_out,
                        Tensor<Scalar>& grad_table) {
  auto g = grad_table.matrix();
  const auto go = grad_out.matrix();
  for (std::size_t i = 0; i < ids.size(); ++i) g.row(ids[i]) += go.row(static_cast<Index>(i));
}

// ---------------------------------------------------------------------------
// Conv1D, valid padding, stride 1

/// x: T x C, kernel: K x C x F, bias: F  ->  (T - K + 1) x F
template <typename Scalar>
Tensor<Scalar> conv1d_forward(const Tensor<Scalar>& x, const Tensor<Scalar>& kernel,
                              const Tensor<Scalar>& bias) {
  detail::require(x.rank() == 2 && kernel.rank() == 3 && bias.rank() == 1,
                  "conv1d expects x rank 2, kernel rank 3, bias rank 1");
  const Index width = kernel.dim(0);
  const Index channels = kernel.dim(1);
  const Index filters = kernel.dim(2);
  detail::require(x.dim(1) == channels, "conv1d channel mismatch: input " + shape_string(x.shape()) +
                                            ", kernel " + shape_string(kernel.shape()));
  detail::require(bias.dim(0) == filters, "conv1d bias size mismatch");
  detail::require(x.dim(0) >= width, "conv1d input length " + std::to_string(x.dim(0)) +
                                         " shorter than kernel width " + std::to_string(width));

  const Index steps = x.dim(0) - width + 1;
  Tensor<Scalar> out({steps, filters});
  auto y = out.matrix();
  y.rowwise() = bias.flat().transpose();
  const auto xm = x.matrix();
  for (Index k = 0; k < width; ++k) y.noalias() += xm.middleRows(k, steps) * kernel.slice(k);
  return out;
}

/// Returns dL/dx; accumulates dL/dkernel and dL/dbias.
template <typename Scalar>
Tensor<Scalar> conv1d_backward(const Tensor<Scalar>& x, const Tensor<Scalar>& kernel,
                               const Tensor<Scalar>& grad_out, Tensor<Scalar>& grad_kernel,
                               Tensor<Scalar>& grad_bias) {
  const Index width = kernel.dim(0);
  const Index steps = grad_out.dim(0);
  const auto xm = x.matrix();
  const auto go = grad_out.matrix();

  Tensor<Scalar> grad_x(x.shape());
  auto gx = grad_x.matrix();
  for (Index k = 0; k < width; ++k) {
    grad_kernel.slice(k).noalias() += xm.middleRows(k, steps).transpose() * go;
    gx.middleRows(k, steps).noalias() += go * kernel.slice(k).transpose();
  }
  grad_bias.flat() += go.colwise().sum().transpose();
  return grad_x;
}

// ---------------------------------------------------------------------------
// ReLU

template <typename Scalar>
Tensor<Scalar> relu(const Tensor<Scalar>& x) {
  Tensor<Scalar> out(x.shape());
  out.flat() = x.flat().cwiseMax(Scalar(0));
  return out;
}

/// Gradient passes where the pre-activation is strictly positive.
template <typename Scalar>
Tensor<Scalar> relu_backward(const Tensor<Scalar>& pre, const Tensor<Scalar>& grad_out) {
  Tensor<Scalar> out(pre.shape());
  out.flat() = (pre.flat().array() > Scalar(0)).select(grad_out.flat(), Scalar(0));
  return out;
}

// ---------------------------------------------------------------------------
// MaxPool1D

template <typename Scalar>
struct Pooled {
  Tensor<Scalar> output;
  /// Input row of the winner for each output element, row-major like output.
  std::vector<Index> argmax;
  Index input_rows = 0;
};

/// Window/stride along the time axis; trailing rows that do not fill a
/// window are dropped. Ties go to the earlier row.
template <typename Scalar>
Pooled<Scalar> maxpool1d(const Tensor<Scalar>& x, Index window = 2, Index stride = 2) {
  detail::require(x.rank() == 2, "maxpool1d expects a rank-2 input");
  detail::require(window >= 1 && stride >= 1, "maxpool1d window and stride must be positive");
  detail::require(x.dim(0) >= window, "maxpool1d input length " + std::to_string(x.dim(0)) +
                                          " shorter than window " + std::to_string(window));
  const Index rows = (x.dim(0) - window) / stride + 1;
  const Index cols = x.dim(1);
  Pooled<Scalar> p{Tensor<Scalar>({rows, cols}), std::vector<Index>(static_cast<std::size_t>(rows * cols)),
                   x.dim(0)};
  for (Index t = 0; t < rows; ++t) {
    for (Index c = 0; c < cols; ++c) {
      Index best = t * stride;
      for (Index r = best + 1; r < t * stride + window; ++r) {
        if (x(r, c) > x(best, c)) best = r;
      }
      p.output(t, c) = x(best, c);
      p.argmax[static_cast<std::size_t>(t * cols + c)] = best;
    }
  }
  return p;
}

template <typename Scalar>
Tensor<Scalar> maxpool1d_backward(const Pooled<Scalar>& pooled, const Tensor<Scalar>& grad_out) {
  const Index cols = grad_out.dim(1);
  Tensor<Scalar> grad_x({pooled.input_rows, cols});
  for (Index t = 0; t < grad_out.dim(0); ++t) {
    for (Index c = 0; c < cols; ++c) {
      grad_x(pooled.argmax[static_cast<std::size_t>(t * cols + c)], c) += grad_out(t, c);
    }
  }
  return grad_x;
}

// ---------------------------------------------------------------------------
// Dense

/// x: n, weight: n x m, bias: m  ->  m
template <typename Scalar>
Tensor<Scalar> dense_forward(const Tensor<Scalar>& x, const Tensor<Scalar>& weight,
                             const Tensor<Scalar>& bias) {
  detail::require(x.rank() == 1 && weight.rank() == 2 && bias.rank() == 1,
                  "dense expects x rank 1, weight rank 2, bias rank 1");
  detail::require(weight.dim(0) == x.dim(0) && weight.dim(1) == bias.dim(0),
                  "dense shape mismatch: x " + shape_string(x.shape()) + ", weight " +
                      shape_string(weight.shape()) + ", bias " + shape_string(bias.shape()));
  return Tensor<Scalar>::from_vector(weight.matrix().transpose() * x.flat() + bias.flat());
}

/// Returns dL/dx; accumulates dL/dweight = x * grad_out^T and dL/dbias.
template <typename Scalar>
Tensor<Scalar> dense_backward(const Tensor<Scalar>& x, const Tensor<Scalar>& weight,
                              const Tensor<Scalar>& grad_out, Tensor<Scalar>& grad_weight,
                              Tensor<Scalar>& grad_bias) {
  grad_weight.matrix().noalias() += x.flat() * grad_out.flat().transpose();
  grad_bias.flat() += grad_out.flat();
  return Tensor<Scalar>::from_vector(weight.matrix() * grad_out.flat());
}

// ---------------------------------------------------------------------------
// Softmax and categorical cross-entropy

template <typename Scalar>
Tensor<Scalar> softmax(const Tensor<Scalar>& logits) {
  const Scalar peak = logits.flat().maxCoeff();
  Vector<Scalar> e = (logits.flat().array() - peak).exp().matrix();
  return Tensor<Scalar>::from_vector(e / e.sum());
}

inline constexpr double kProbabilityFloor = 1e-12;

/// -log p[label] with p clamped below at 1e-12.
template <typename Scalar>
Scalar cross_entropy(const Tensor<Scalar>& probs, Index label) {
  detail::require(label >= 0 && label < probs.size(), "cross_entropy label out of range");
  return -std::log(std::max(probs(label), Scalar(kProbabilityFloor)));
}

/// One-hot target form; rejects targets that are not exactly one-hot.
template <typename Scalar>
Scalar cross_entropy(const Tensor<Scalar>& probs, const Tensor<Scalar>& one_hot) {
  detail::require(one_hot.shape() == probs.shape(), "cross_entropy target shape mismatch");
  Index hot = -1;
  for (Index i = 0; i < one_hot.size(); ++i) {
    if (one_hot(i) == Scalar(1) && hot < 0) {
      hot = i;
    } else if (one_hot(i) != Scalar(0)) {
      throw std::invalid_argument("cross_entropy target is not one-hot");
    }
  }
  detail::require(hot >= 0, "cross_entropy target is not one-hot");
  return cross_entropy(probs, hot);
}

/// Gradient of softmax + cross-entropy with respect to the logits: p - y.
template <typename Scalar>
Tensor<Scalar> softmax_cross_entropy_backward(const Tensor<Scalar>& probs, Index label) {
  Tensor<Scalar> g = probs;
  g(label) -= Scalar(1);
  return g;
}

}  // namespace emocnn
