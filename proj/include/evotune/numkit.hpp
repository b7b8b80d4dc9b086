// Copyright 2026 The Evotune Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense multilayer perceptron kernel: forward pass with cache, exact
// backpropagation, Adam/SGD updates and a central-difference gradient
// estimator used to validate the analytic path.
//
// Matrices are batch-major: an input batch is [batch x in], layer weights
// are [out x in], and a layer computes act(X * W^T + b).

#ifndef EVOTUNE_NUMKIT_HPP_
#define EVOTUNE_NUMKIT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "evotune/errors.hpp"
#include "evotune/rng.hpp"

namespace evotune::numkit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Activation { kIdentity, kRelu, kTanh };

struct Layer {
  Matrix weight;  // [out x in]
  Vector bias;    // [out]
};

struct MlpParams {
  std::vector<Layer> layers;
  Activation hidden_activation = Activation::kRelu;
  Activation output_activation = Activation::kIdentity;

  Eigen::Index input_dim() const { return layers.front().weight.cols(); }
  Eigen::Index output_dim() const { return layers.back().weight.rows(); }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const Layer& l : layers) n += l.weight.size() + l.bias.size();
    return n;
  }

  Activation activation_of(std::size_t layer) const {
    return layer + 1 == layers.size() ? output_activation : hidden_activation;
  }

  // Same shapes and activations, every entry zero.
  MlpParams zeros_like() const {
    MlpParams out = *this;
    for (Layer& l : out.layers) {
      l.weight.setZero();
      l.bias.setZero();
    }
    return out;
  }

  bool same_shape(const MlpParams& other) const {
    if (layers.size() != other.layers.size()) return false;
    for (std::size_t k = 0; k < layers.size(); ++k) {
      if (layers[k].weight.rows() != other.layers[k].weight.rows() ||
          layers[k].weight.cols() != other.layers[k].weight.cols() ||
          layers[k].bias.size() != other.layers[k].bias.size()) {
        return false;
      }
    }
    return true;
  }

  bool all_finite() const {
    for (const Layer& l : layers) {
      if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
    }
    return true;
  }

  // Visits every scalar parameter in a fixed order (layer, weight col-major, bias).
  template <typename Fn>
  void for_each(Fn&& fn) {
    for (Layer& l : layers) {
      for (Eigen::Index i = 0; i < l.weight.size(); ++i) fn(l.weight.data()[i]);
      for (Eigen::Index i = 0; i < l.bias.size(); ++i) fn(l.bias.data()[i]);
    }
  }
  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (const Layer& l : layers) {
      for (Eigen::Index i = 0; i < l.weight.size(); ++i) fn(l.weight.data()[i]);
      for (Eigen::Index i = 0; i < l.bias.size(); ++i) fn(l.bias.data()[i]);
    }
  }

  std::vector<double> flatten() const {
    std::vector<double> out;
    out.reserve(parameter_count());
    for_each([&](double v) { out.push_back(v); });
    return out;
  }

  void assign(const std::vector<double>& flat) {
    if (flat.size() != parameter_count()) throw ShapeError("assign: parameter count mismatch");
    std::size_t i = 0;
    for_each([&](double& v) { v = flat[i++]; });
  }
};

inline void check_same_shape(const MlpParams& a, const MlpParams& b, const char* where) {
  if (!a.same_shape(b)) throw ShapeError(std::string(where) + ": parameter shapes differ");
}

inline void check_chain(const MlpParams& params) {
  if (params.layers.empty()) throw ShapeError("mlp: no layers");
  for (std::size_t k = 0; k < params.layers.size(); ++k) {
    const Layer& l = params.layers[k];
    if (l.bias.size() != l.weight.rows()) throw ShapeError("mlp: bias/weight rows differ");
    if (k > 0 && l.weight.cols() != params.layers[k - 1].weight.rows()) {
      throw ShapeError("mlp: layer " + std::to_string(k) + " input dim does not chain");
    }
  }
}

// Weights and biases uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)]; the final
// layer is multiplied by final_layer_scale.
inline MlpParams init_mlp(const std::vector<int>& sizes, Activation hidden, Activation output,
                          Rng& rng, double final_layer_scale = 1.0) {
  if (sizes.size() < 2) throw ShapeError("init_mlp: need at least input and output sizes");
  MlpParams p;
  p.hidden_activation = hidden;
  p.output_activation = output;
  for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
    const int fan_in = sizes[k];
    const int fan_out = sizes[k + 1];
    if (fan_in < 1 || fan_out < 1) throw ShapeError("init_mlp: layer sizes must be positive");
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    const double scale = (k + 2 == sizes.size()) ? final_layer_scale : 1.0;
    Layer l{Matrix(fan_out, fan_in), Vector(fan_out)};
    for (Eigen::Index i = 0; i < l.weight.size(); ++i) {
      l.weight.data()[i] = scale * uniform(rng, -bound, bound);
    }
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) {
      l.bias[i] = scale * uniform(rng, -bound, bound);
    }
    p.layers.push_back(std::move(l));
  }
  return p;
}

struct ForwardCache {
  std::vector<Matrix> inputs;           // input to layer k, [batch x in_k]
  std::vector<Matrix> pre_activations;  // [batch x out_k]
  std::vector<Matrix> activations;      // [batch x out_k]
};

namespace detail {

inline void apply_activation(Activation act, Matrix& m) {
  switch (act) {
    case Activation::kIdentity:
      break;
    case Activation::kRelu:
      m = m.cwiseMax(0.0);
      break;
    case Activation::kTanh:
      m = m.array().tanh().matrix();
      break;
  }
}

// grad w.r.t. pre-activation given grad w.r.t. activation.
inline Matrix activation_backward(Activation act, const Matrix& pre, const Matrix& post,
                                  const Matrix& upstream) {
  switch (act) {
    case Activation::kIdentity:
      return upstream;
    case Activation::kRelu:
      return (pre.array() > 0.0).select(upstream, 0.0);
    case Activation::kTanh:
      return (upstream.array() * (1.0 - post.array().square())).matrix();
  }
  return upstream;
}

}  // namespace detail

struct ForwardResult {
  Matrix output;
  ForwardCache cache;
};

inline ForwardResult mlp_forward(const MlpParams& params, const Matrix& input) {
  check_chain(params);
  if (input.cols() != params.input_dim()) {
    throw ShapeError("mlp_forward: input width " + std::to_string(input.cols()) +
                     " != " + std::to_string(params.input_dim()));
  }
  ForwardResult r;
  const std::size_t n = params.layers.size();
  r.cache.inputs.reserve(n);
  r.cache.pre_activations.reserve(n);
  r.cache.activations.reserve(n);
  Matrix x = input;
  for (std::size_t k = 0; k < n; ++k) {
    const Layer& l = params.layers[k];
    Matrix z = x * l.weight.transpose();
    z.rowwise() += l.bias.transpose();
    Matrix a = z;
    detail::apply_activation(params.activation_of(k), a);
    r.cache.inputs.push_back(std::move(x));
    r.cache.pre_activations.push_back(std::move(z));
    x = a;
    r.cache.activations.push_back(std::move(a));
  }
  r.output = std::move(x);
  return r;
}

// Forward pass without retaining the cache.
inline Matrix mlp_predict(const MlpParams& params, const Matrix& input) {
  if (input.cols() != params.input_dim()) throw ShapeError("mlp_predict: input width mismatch");
  Matrix x = input;
  for (std::size_t k = 0; k < params.layers.size(); ++k) {
    const Layer& l = params.layers[k];
    Matrix z = x * l.weight.transpose();
    z.rowwise() += l.bias.transpose();
    detail::apply_activation(params.activation_of(k), z);
    x = std::move(z);
  }
  return x;
}

struct BackwardResult {
  MlpParams param_grads;
  Matrix input_grad;
};

// Gradients of sum(upstream_grad .* output) w.r.t. all parameters and the input.
inline BackwardResult mlp_backward(const MlpParams& params, const ForwardCache& cache,
                                   const Matrix& upstream_grad) {
  const std::size_t n = params.layers.size();
  if (cache.inputs.size() != n || cache.activations.size() != n) {
    throw ShapeError("mlp_backward: cache does not match parameters");
  }
  const Matrix& out = cache.activations.back();
  if (upstream_grad.rows() != out.rows() || upstream_grad.cols() != out.cols()) {
    throw ShapeError("mlp_backward: upstream gradient shape mismatch");
  }
  BackwardResult r;
  r.param_grads = params.zeros_like();
  Matrix grad = upstream_grad;
  for (std::size_t k = n; k-- > 0;) {
    const Layer& l = params.layers[k];
    if (cache.inputs[k].cols() != l.weight.cols()) {
      throw ShapeError("mlp_backward: cache does not match parameters");
    }
    Matrix dz = detail::activation_backward(params.activation_of(k), cache.pre_activations[k],
                                            cache.activations[k], grad);
    r.param_grads.layers[k].weight.noalias() = dz.transpose() * cache.inputs[k];
    r.param_grads.layers[k].bias = dz.colwise().sum().transpose();
    grad.noalias() = dz * l.weight;
  }
  r.input_grad = std::move(grad);
  return r;
}

struct AdamState {
  MlpParams first_moment;
  MlpParams second_moment;
  std::int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;

  static AdamState for_params(const MlpParams& params) {
    AdamState s;
    s.first_moment = params.zeros_like();
    s.second_moment = params.zeros_like();
    return s;
  }
};

// In-place Adam update with bias correction.
inline void adam_update(MlpParams& params, const MlpParams& grads, AdamState& state, double lr) {
  check_same_shape(params, grads, "adam_step");
  check_same_shape(params, state.first_moment, "adam_step");
  if (!(lr >= 0.0)) throw DomainError("adam_step: learning rate must be >= 0");
  if (!grads.all_finite()) throw NumericError("adam_step: non-finite gradient");
  state.step += 1;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  const double b1 = state.beta1;
  const double b2 = state.beta2;
  const double eps = state.eps_hat;
  for (std::size_t k = 0; k < params.layers.size(); ++k) {
    auto update = [&](auto& p, const auto& g, auto& m, auto& v) {
      m = b1 * m + (1.0 - b1) * g;
      v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
      p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
    };
    update(params.layers[k].weight, grads.layers[k].weight, state.first_moment.layers[k].weight,
           state.second_moment.layers[k].weight);
    update(params.layers[k].bias, grads.layers[k].bias, state.first_moment.layers[k].bias,
           state.second_moment.layers[k].bias);
  }
}

struct AdamResult {
  MlpParams params;
  AdamState state;
};

inline AdamResult adam_step(const MlpParams& params, const MlpParams& grads,
                            const AdamState& state, double lr) {
  AdamResult r{params, state};
  adam_update(r.params, grads, r.state, lr);
  return r;
}

inline void sgd_update(MlpParams& params, const MlpParams& grads, double lr) {
  check_same_shape(params, grads, "sgd_step");
  if (!(lr >= 0.0)) throw DomainError("sgd_step: learning rate must be >= 0");
  if (!grads.all_finite()) throw NumericError("sgd_step: non-finite gradient");
  for (std::size_t k = 0; k < params.layers.size(); ++k) {
    params.layers[k].weight -= lr * grads.layers[k].weight;
    params.layers[k].bias -= lr * grads.layers[k].bias;
  }
}

// Central-difference estimate of df/dparams, one coordinate at a time.
inline MlpParams finite_diff_grad(const std::function<double(const MlpParams&)>& f,
                                  const MlpParams& params, double step) {
  if (!(step > 0.0)) throw DomainError("finite_diff_grad: step must be > 0");
  MlpParams probe = params;
  MlpParams grads = params.zeros_like();
  std::vector<double*> slots;
  probe.for_each([&](double& v) { slots.push_back(&v); });
  std::vector<double*> out;
  grads.for_each([&](double& v) { out.push_back(&v); });
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const double original = *slots[i];
    *slots[i] = original + step;
    const double plus = f(probe);
    *slots[i] = original - step;
    const double minus = f(probe);
    *slots[i] = original;
    *out[i] = (plus - minus) / (2.0 * step);
  }
  return grads;
}

// |a-b| / max(|a|, |b|, floor).
inline double relative_error(double a, double b, double floor = 1e-8) {
  const double denom = std::max({std::abs(a), std::abs(b), floor});
  return std::abs(a - b) / denom;
}

}  // namespace evotune::numkit

#endif  // EVOTUNE_NUMKIT_HPP_
