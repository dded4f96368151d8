// RMSProp: a <- rho*a + (1-rho)*g^2;  theta <- theta - lr*g / (sqrt(a) + eps)
#pragma once

#include <stdexcept>

#include "emocnn/model.hpp"

namespace emocnn {

struct RmsPropConfig {
  double learning_rate = 1e-3;
  double rho = 0.9;
  double epsilon = 1e-7;

  void validate() const {
    if (!(learning_rate > 0) || !(rho >= 0 && rho < 1) || !(epsilon > 0)) {
      throw std::invalid_argument("rmsprop: need lr > 0, 0 <= rho < 1, epsilon > 0");
    }
  }
};

class NonFiniteGradient : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Scalar>
struct RmsPropState {
  RmsPropConfig config;
  ParamSet<Scalar> accumulators;

  static RmsPropState for_model(const ModelConfig& model_config, RmsPropConfig config = {}) {
    config.validate();
    return {config, ParamSet<Scalar>::zeros(model_config)};
  }
};

/// Single-tensor update; throws NonFiniteGradient before touching anything.
template <typename Scalar>
void rmsprop_update(Tensor<Scalar>& param, const Tensor<Scalar>& grad, Tensor<Scalar>& accumulator,
                    const RmsPropConfig& config) {
  if (param.shape() != grad.shape() || param.shape() != accumulator.shape()) {
    throw std::invalid_argument("rmsprop: shape mismatch " + shape_string(param.shape()) + " vs " +
                                shape_string(grad.shape()));
  }
  if (!grad.all_finite()) throw NonFiniteGradient("rmsprop: non-finite gradient");
  const Scalar rho = static_cast<Scalar>(config.rho);
  const Scalar lr = static_cast<Scalar>(config.learning_rate);
  const Scalar eps = static_cast<Scalar>(config.epsilon);
  auto a = accumulator.flat().array();
  const auto g = grad.flat().array();
  a = rho * a + (Scalar(1) - rho) * g.square();
  param.flat().array() -= lr * g / (a.sqrt() + eps);
}

template <typename Scalar>
void rmsprop_step(ParamSet<Scalar>& params, const ParamSet<Scalar>& grads, RmsPropState<Scalar>& state) {
  for (std::size_t i = 0; i < kParamCount; ++i) {
    if (!grads.tensors[i].all_finite()) {
      throw NonFiniteGradient(std::string("rmsprop: non-finite gradient for ") +
                              std::string(kParamNames[i]));
    }
  }
  for (std::size_t i = 0; i < kParamCount; ++i) {
    rmsprop_update(params.tensors[i], grads.tensors[i], state.accumulators.tensors[i], state.config);
  }
}

/// Updates the model and invalidates outstanding forward caches.
template <typename Scalar>
void rmsprop_step(Model<Scalar>& model, const ParamSet<Scalar>& grads, RmsPropState<Scalar>& state) {
  rmsprop_step(model.params, grads, state);
  ++model.generation;
}

}  // namespace emocnn
