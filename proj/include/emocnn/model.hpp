// The embedding -> conv/pool x2 -> dense x2 emotion classifier.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "emocnn/layers.hpp"
#include "emocnn/random.hpp"
#include "emocnn/tensor.hpp"

namespace emocnn {

/// Layer sizes derived from a configuration, for one example.
struct ShapeChain {
  Index seq_len = 0;
  Index conv1 = 0;  // rows after conv1
  Index pool1 = 0;
  Index conv2 = 0;
  Index pool2 = 0;
  Index flatten = 0;

  friend bool operator==(const ShapeChain&, const ShapeChain&) = default;
};

struct ModelConfig {
  Index seq_len = 0;
  Index vocab_size = 0;
  Index embed_dim = 128;
  Index conv1_filters = 64;
  Index conv2_filters = 32;
  Index kernel = 3;
  Index pool = 2;
  Index pool_stride = 2;
  Index dense_hidden = 16;
  Index classes = 4;

  /// Throws std::invalid_argument unless every layer output is non-empty.
  void validate() const;
  ShapeChain shapes() const;
  /// True when no pooling stage drops trailing rows, so every input position
  /// reaches the flatten layer.
  bool covers_all_positions() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Shortest sequence the default architecture accepts.
inline constexpr Index kMinSequenceLength = 10;

inline ShapeChain ModelConfig::shapes() const {
  ShapeChain s;
  s.seq_len = seq_len;
  s.conv1 = seq_len - kernel + 1;
  s.pool1 = s.conv1 >= pool ? (s.conv1 - pool) / pool_stride + 1 : 0;
  s.conv2 = s.pool1 - kernel + 1;
  s.pool2 = s.conv2 >= pool ? (s.conv2 - pool) / pool_stride + 1 : 0;
  s.flatten = s.pool2 * conv2_filters;
  return s;
}

inline bool ModelConfig::covers_all_positions() const {
  const ShapeChain s = shapes();
  return s.pool1 >= 1 && s.pool2 >= 1 && (s.conv1 - pool) % pool_stride == 0 &&
         (s.conv2 - pool) % pool_stride == 0 && pool >= pool_stride;
}

inline void ModelConfig::validate() const {
  auto positive = [](Index v, const char* what) {
    if (v < 1) throw std::invalid_argument(std::string("model config: ") + what + " must be positive");
  };
  positive(vocab_size, "vocab_size");
  positive(embed_dim, "embed_dim");
  positive(conv1_filters, "conv1_filters");
  positive(conv2_filters, "conv2_filters");
  positive(kernel, "kernel");
  positive(pool, "pool");
  positive(pool_stride, "pool_stride");
  positive(dense_hidden, "dense_hidden");
  positive(classes, "classes");
  const ShapeChain s = shapes();
  if (seq_len < 1 || s.conv1 < 1 || s.pool1 < 1 || s.conv2 < 1 || s.pool2 < 1) {
    throw std::invalid_argument("model config: sequence length " + std::to_string(seq_len) +
                                " too short for the conv/pool stack");
  }
}

enum class ParamId : std::size_t {
  embedding,
  conv1_kernel,
  conv1_bias,
  conv2_kernel,
  conv2_bias,
  dense1_weight,
  dense1_bias,
  dense2_weight,
  dense2_bias,
};

inline constexpr std::size_t kParamCount = 9;
inline constexpr std::array<std::string_view, kParamCount> kParamNames{
    "embedding",     "conv1.kernel", "conv1.bias",   "conv2.kernel", "conv2.bias",
    "dense1.weight", "dense1.bias",  "dense2.weight", "dense2.bias"};

/// Parameter shapes in ParamId order.
inline std::array<Shape, kParamCount> parameter_shapes(const ModelConfig& c) {
  const ShapeChain s = c.shapes();
  return {Shape{c.vocab_size, c.embed_dim},
          Shape{c.kernel, c.embed_dim, c.conv1_filters},
          Shape{c.conv1_filters},
          Shape{c.kernel, c.conv1_filters, c.conv2_filters},
          Shape{c.conv2_filters},
          Shape{s.flatten, c.dense_hidden},
          Shape{c.dense_hidden},
          Shape{c.dense_hidden, c.classes},
          Shape{c.classes}};
}

/// Number of scalars in the given parameter tensor.
inline Index parameter_count(const ModelConfig& c, ParamId id) {
  const auto shapes = parameter_shapes(c);
  Index n = 1;
  for (Index d : shapes[static_cast<std::size_t>(id)]) n *= d;
  return n;
}

inline Index parameter_count(const ModelConfig& c, bool include_embedding = true) {
  Index n = 0;
  for (std::size_t i = include_embedding ? 0 : 1; i < kParamCount; ++i) {
    n += parameter_count(c, static_cast<ParamId>(i));
  }
  return n;
}

/// One tensor per model parameter; also used for gradients and optimizer state.
template <typename Scalar>
struct ParamSet {
  std::array<Tensor<Scalar>, kParamCount> tensors;

  static ParamSet zeros(const ModelConfig& config) {
    ParamSet p;
    const auto shapes = parameter_shapes(config);
    for (std::size_t i = 0; i < kParamCount; ++i) p.tensors[i] = Tensor<Scalar>(shapes[i]);
    return p;
  }

  Tensor<Scalar>& operator[](ParamId id) { return tensors[static_cast<std::size_t>(id)]; }
  const Tensor<Scalar>& operator[](ParamId id) const { return tensors[static_cast<std::size_t>(id)]; }

  void set_zero() {
    for (auto& t : tensors) t.set_zero();
  }
  void scale(Scalar s) {
    for (auto& t : tensors) t.flat() *= s;
  }
  bool all_finite() const {
    for (const auto& t : tensors) {
      if (!t.all_finite()) return false;
    }
    return true;
  }
  bool bitwise_equal(const ParamSet& other) const {
    for (std::size_t i = 0; i < kParamCount; ++i) {
      if (!tensors[i].bitwise_equal(other.tensors[i])) return false;
    }
    return true;
  }
};

template <typename Scalar>
struct Model {
  ModelConfig config;
  ParamSet<Scalar> params;
  /// Bumped whenever parameters change; forward caches record it.
  std::uint64_t generation = 0;
};

/// Embedding ~ U(-0.05, 0.05); conv and dense weights Glorot-uniform with
/// conv fan_in = K*C_in, fan_out = K*F; biases zero.
template <typename Scalar>
Model<Scalar> init_model(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  Model<Scalar> model{config, ParamSet<Scalar>::zeros(config), 0};
  Rng rng(seed);

  auto fill = [&rng](Tensor<Scalar>& t, double limit) {
    for (auto& v : t.values()) v = static_cast<Scalar>(rng.uniform(-limit, limit));
  };
  auto glorot = [](Index fan_in, Index fan_out) {
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  };

  auto& p = model.params;
  fill(p[ParamId::embedding], 0.05);
  fill(p[ParamId::conv1_kernel],
       glorot(config.kernel * config.embed_dim, config.kernel * config.conv1_filters));
  fill(p[ParamId::conv2_kernel],
       glorot(config.kernel * config.conv1_filters, config.kernel * config.conv2_filters));
  fill(p[ParamId::dense1_weight], glorot(config.shapes().flatten, config.dense_hidden));
  fill(p[ParamId::dense2_weight], glorot(config.dense_hidden, config.classes));
  return model;
}

/// Activations kept for the backward pass.
template <typename Scalar>
struct ForwardCache {
  bool valid = false;
  std::uint64_t generation = 0;
  std::vector<int> ids;
  Tensor<Scalar> embedded;    // L x E
  Tensor<Scalar> conv1_pre;   // c1 x F1
  Tensor<Scalar> conv1_act;
  Pooled<Scalar> pool1;       // p1 x F1
  Tensor<Scalar> conv2_pre;   // c2 x F2
  Tensor<Scalar> conv2_act;
  Pooled<Scalar> pool2;       // p2 x F2
  Tensor<Scalar> flat;        // p2*F2
  Tensor<Scalar> dense1_pre;  // H
  Tensor<Scalar> dense1_act;
  Tensor<Scalar> logits;      // classes
  Tensor<Scalar> probs;
};

namespace detail {

template <typename Scalar>
void expect_shape(const Tensor<Scalar>& t, const Shape& expected, const char* stage) {
  if (t.shape() != expected) {
    throw std::logic_error(std::string("shape chain broken at ") + stage + ": got " +
                           shape_string(t.shape()) + ", expected " + shape_string(expected));
  }
}

}  // namespace detail

/// Runs one padded sequence through the network. The shape of every stage is
/// checked against ModelConfig::shapes().
template <typename Scalar>
ForwardCache<Scalar> forward(const Model<Scalar>& model, std::span<const int> ids) {
  const ModelConfig& c = model.config;
  const ShapeChain s = c.shapes();
  if (static_cast<Index>(ids.size()) != c.seq_len) {
    throw std::invalid_argument("input length " + std::to_string(ids.size()) +
                                " does not match model sequence length " + std::to_string(c.seq_len));
  }
  const auto& p = model.params;
  ForwardCache<Scalar> fc;
  fc.ids.assign(ids.begin(), ids.end());

  fc.embedded = embedding_forward(ids, p[ParamId::embedding]);
  detail::expect_shape(fc.embedded, {s.seq_len, c.embed_dim}, "embedding");

  fc.conv1_pre = conv1d_forward(fc.embedded, p[ParamId::conv1_kernel], p[ParamId::conv1_bias]);
  detail::expect_shape(fc.conv1_pre, {s.conv1, c.conv1_filters}, "conv1");
  fc.conv1_act = relu(fc.conv1_pre);
  fc.pool1 = maxpool1d(fc.conv1_act, c.pool, c.pool_stride);
  detail::expect_shape(fc.pool1.output, {s.pool1, c.conv1_filters}, "pool1");

  fc.conv2_pre = conv1d_forward(fc.pool1.output, p[ParamId::conv2_kernel], p[ParamId::conv2_bias]);
  detail::expect_shape(fc.conv2_pre, {s.conv2, c.conv2_filters}, "conv2");
  fc.conv2_act = relu(fc.conv2_pre);
  fc.pool2 = maxpool1d(fc.conv2_act, c.pool, c.pool_stride);
  detail::expect_shape(fc.pool2.output, {s.pool2, c.conv2_filters}, "pool2");

  fc.flat = Tensor<Scalar>::from_vector(fc.pool2.output.flat());
  detail::expect_shape(fc.flat, {s.flatten}, "flatten");

  fc.dense1_pre = dense_forward(fc.flat, p[ParamId::dense1_weight], p[ParamId::dense1_bias]);
  detail::expect_shape(fc.dense1_pre, {c.dense_hidden}, "dense1");
  fc.dense1_act = relu(fc.dense1_pre);
  fc.logits = dense_forward(fc.dense1_act, p[ParamId::dense2_weight], p[ParamId::dense2_bias]);
  detail::expect_shape(fc.logits, {c.classes}, "dense2");
  fc.probs = softmax(fc.logits);

  fc.generation = model.generation;
  fc.valid = true;
  return fc;
}

/// Cross-entropy of a completed forward pass.
template <typename Scalar>
Scalar loss(const ForwardCache<Scalar>& cache, Index label) {
  return cross_entropy(cache.probs, label);
}

/// Adds the gradient of the example's loss into `grads`.
template <typename Scalar>
void accumulate_gradients(const Model<Scalar>& model, const ForwardCache<Scalar>& fc, Index label,
                          ParamSet<Scalar>& grads) {
  if (!fc.valid) throw std::logic_error("backward called without a forward cache");
  if (fc.generation != model.generation) {
    throw std::logic_error("backward called with a stale forward cache");
  }
  if (label < 0 || label >= model.config.classes) throw std::invalid_argument("label out of range");
  const auto& p = model.params;

  auto g_logits = softmax_cross_entropy_backward(fc.probs, label);
  auto g_d1_act = dense_backward(fc.dense1_act, p[ParamId::dense2_weight], g_logits,
                                 grads[ParamId::dense2_weight], grads[ParamId::dense2_bias]);
  auto g_d1_pre = relu_backward(fc.dense1_pre, g_d1_act);
  auto g_flat = dense_backward(fc.flat, p[ParamId::dense1_weight], g_d1_pre,
                               grads[ParamId::dense1_weight], grads[ParamId::dense1_bias]);

  Tensor<Scalar> g_pool2(fc.pool2.output.shape());
  g_pool2.flat() = g_flat.flat();
  auto g_c2_act = maxpool1d_backward(fc.pool2, g_pool2);
  auto g_c2_pre = relu_backward(fc.conv2_pre, g_c2_act);
  auto g_pool1 = conv1d_backward(fc.pool1.output, p[ParamId::conv2_kernel], g_c2_pre,
                                 grads[ParamId::conv2_kernel], grads[ParamId::conv2_bias]);
  auto g_c1_act = maxpool1d_backward(fc.pool1, g_pool1);
  auto g_c1_pre = relu_backward(fc.conv1_pre, g_c1_act);
  auto g_embedded = conv1d_backward(fc.embedded, p[ParamId::conv1_kernel], g_c1_pre,
                                    grads[ParamId::conv1_kernel], grads[ParamId::conv1_bias]);
  embedding_backward(std::span<const int>(fc.ids), g_embedded, grads[ParamId::embedding]);
}

/// Gradients of one example's loss for every parameter tensor.
template <typename Scalar>
ParamSet<Scalar> model_backward(const Model<Scalar>& model, const ForwardCache<Scalar>& cache,
                                Index label) {
  auto grads = ParamSet<Scalar>::zeros(model.config);
  accumulate_gradients(model, cache, label, grads);
  return grads;
}

/// One-hot target form; the target must be exactly one-hot.
template <typename Scalar>
ParamSet<Scalar> model_backward(const Model<Scalar>& model, const ForwardCache<Scalar>& cache,
                                const Tensor<Scalar>& one_hot) {
  cross_entropy(cache.probs, one_hot);  // validates the target
  Index label = 0;
  one_hot.flat().maxCoeff(&label);
  return model_backward(model, cache, label);
}

}  // namespace emocnn
