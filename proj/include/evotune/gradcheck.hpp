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

// Finite-difference verification of the analytic gradients used in training:
// raw MLP backprop, critic MSE loss, and actor loss -mean Q(s, mu(s)).
//
// Central differences straddling a ReLU kink are not derivative estimates, so
// every probe also records the ReLU activation pattern. When the pattern at
// theta+h, theta-h and theta disagree the step is shrunk; if no step in the
// ladder is kink-free the coordinate is reported as skipped.

#ifndef EVOTUNE_GRADCHECK_HPP_
#define EVOTUNE_GRADCHECK_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "evotune/agent.hpp"
#include "evotune/envs.hpp"
#include "evotune/numkit.hpp"
#include "evotune/rng.hpp"

namespace evotune::gradcheck {

using numkit::Matrix;
using numkit::MlpParams;

inline constexpr double kStep = 1e-5;
inline constexpr double kRelativeTolerance = 1e-4;

using WideMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

inline WideMatrix widen(const Matrix& m) { return m.cast<long double>(); }

// Extended-precision forward pass that folds each ReLU on/off decision into
// `pattern`. Extended precision keeps difference-quotient roundoff well below
// the tolerance even for gradient entries near 1e-9.
inline WideMatrix forward_with_pattern(const MlpParams& p, const WideMatrix& input,
                                       std::uint64_t& pattern) {
  WideMatrix x = input;
  for (std::size_t k = 0; k < p.layers.size(); ++k) {
    WideMatrix z = x * p.layers[k].weight.cast<long double>().transpose();
    z.rowwise() += p.layers[k].bias.cast<long double>().transpose();
    const auto act = p.activation_of(k);
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      long double& v = z.data()[i];
      if (act == numkit::Activation::kRelu) {
        const bool on = v > 0.0L;
        pattern = mix64(pattern ^ (static_cast<std::uint64_t>(i) << 1 | on));
        if (!on) v = 0.0L;
      } else if (act == numkit::Activation::kTanh) {
        v = std::tanh(v);
      }
    }
    x = std::move(z);
  }
  return x;
}

struct Probe {
  long double value = 0.0L;
  std::uint64_t pattern = 0;
};

using ProbeFn = std::function<Probe(const MlpParams&)>;

struct CheckStats {
  std::size_t checked = 0;
  std::size_t skipped = 0;
  double max_relative_error = 0.0;

  void merge(const CheckStats& o) {
    checked += o.checked;
    skipped += o.skipped;
    max_relative_error = std::max(max_relative_error, o.max_relative_error);
  }
};

// Compares `analytic` against kink-aware central differences of `f` at `params`.
inline CheckStats compare_gradients(const ProbeFn& f, const MlpParams& params,
                                    const MlpParams& analytic, double step = kStep) {
  numkit::check_same_shape(params, analytic, "compare_gradients");
  const std::uint64_t base = f(params).pattern;
  MlpParams probe = params;
  std::vector<double*> slots;
  probe.for_each([&](double& v) { slots.push_back(&v); });
  const std::vector<double> grads = analytic.flatten();
  CheckStats stats;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const double original = *slots[i];
    bool smooth = false;
    double numeric = 0.0;
    for (double h = step; h >= step * 1e-3 && !smooth; h /= 10.0) {
      const double hi = original + h;
      const double lo = original - h;
      *slots[i] = hi;
      const Probe plus = f(probe);
      *slots[i] = lo;
      const Probe minus = f(probe);
      *slots[i] = original;
      if (plus.pattern == base && minus.pattern == base) {
        smooth = true;
        // Divide by the step actually taken after rounding hi/lo to double.
        numeric = static_cast<double>((plus.value - minus.value) /
                                      (static_cast<long double>(hi) - static_cast<long double>(lo)));
      }
    }
    if (!smooth) {
      ++stats.skipped;
      continue;
    }
    ++stats.checked;
    stats.max_relative_error =
        std::max(stats.max_relative_error, numkit::relative_error(grads[i], numeric));
  }
  return stats;
}

struct GradcheckOptions {
  int cases = 20;
  // Scales every analytic gradient by (1 + fault) before comparison. Used as
  // a negative control to prove the check can fail.
  double injected_fault = 0.0;
};

struct CaseResult {
  std::string name;
  CheckStats stats;
  bool passed = false;
};

inline CaseResult make_case(std::string name, const CheckStats& stats) {
  return {std::move(name), stats, stats.checked > 0 && stats.max_relative_error <= kRelativeTolerance};
}

struct GradcheckReport {
  std::vector<CaseResult> cases;
  CheckStats total;
  bool passed = true;
};

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double lo = -1.0,
                            double hi = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = uniform(rng, lo, hi);
  return m;
}

inline int random_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline void inject(MlpParams& grads, double fault) {
  if (fault == 0.0) return;
  grads.for_each([&](double& v) { v *= 1.0 + fault; });
}

// Random MLP (<=3 layers, widths <=32, batch <=16): backprop of
// sum(U .* f(X)) against central differences.
inline CaseResult check_mlp_case(Rng& rng, double fault) {
  const int layers = random_int(rng, 1, 3);
  std::vector<int> sizes{random_int(rng, 1, 32)};
  for (int l = 0; l < layers; ++l) sizes.push_back(random_int(rng, 1, 32));
  const auto out_act = bernoulli(rng, 0.5) ? numkit::Activation::kTanh : numkit::Activation::kIdentity;
  const MlpParams params = numkit::init_mlp(sizes, numkit::Activation::kRelu, out_act, rng);
  const int batch = random_int(rng, 1, 16);
  const Matrix x = random_matrix(batch, sizes.front(), rng);
  const Matrix u = random_matrix(batch, sizes.back(), rng);
  const WideMatrix xw = widen(x);
  const WideMatrix uw = widen(u);
  const auto fwd = numkit::mlp_forward(params, x);
  MlpParams grads = numkit::mlp_backward(params, fwd.cache, u).param_grads;
  inject(grads, fault);
  const ProbeFn f = [&](const MlpParams& p) {
    Probe pr;
    pr.value = forward_with_pattern(p, xw, pr.pattern).cwiseProduct(uw).sum();
    return pr;
  };
  return make_case("mlp", compare_gradients(f, params, grads));
}

inline agent::AgentNets random_agent(Rng& rng, int& batch_out, agent::Batch& batch) {
  envs::EnvSpec spec;
  spec.state_dim = random_int(rng, 2, 5);
  spec.goal_dim = random_int(rng, 2, 4);
  spec.action_dim = random_int(rng, 1, 4);
  agent::NetworkConfig net;
  net.hidden = {random_int(rng, 4, 32), random_int(rng, 4, 32)};
  // Full-scale actor head so the actor gradients are not uniformly tiny.
  net.final_actor_scale = 1.0;
  agent::AgentNets nets = agent::make_agent_nets(spec, net, rng);
  // Targets start as perturbed copies so Q' differs from Q.
  nets.target_critic.for_each([&](double& v) { v += 0.1 * standard_normal(rng); });
  nets.target_actor.for_each([&](double& v) { v += 0.1 * standard_normal(rng); });
  const int b = random_int(rng, 1, 16);
  const int obs = spec.state_dim + spec.goal_dim;
  batch.state_goal = random_matrix(b, obs, rng);
  batch.actions = random_matrix(b, spec.action_dim, rng);
  batch.next_state_goal = random_matrix(b, obs, rng);
  batch.rewards = agent::Vector(b);
  for (int i = 0; i < b; ++i) batch.rewards[i] = bernoulli(rng, 0.5) ? 0.0 : -1.0;
  batch_out = b;
  return nets;
}

inline CaseResult check_critic_case(Rng& rng, double fault) {
  int b = 0;
  agent::Batch batch;
  const agent::AgentNets nets = random_agent(rng, b, batch);
  const double gamma = uniform(rng, 0.0, 0.99);
  const agent::Vector y = agent::critic_target(nets, batch, gamma);
  agent::LossGrad lg = agent::critic_loss_grad(nets, nets.critic, batch, y);
  inject(lg.grads, fault);
  const WideMatrix in = widen(agent::critic_input(nets, batch.state_goal, batch.actions));
  const WideMatrix yw = widen(y);
  const ProbeFn f = [&](const MlpParams& critic) {
    Probe pr;
    const WideMatrix q = forward_with_pattern(critic, in, pr.pattern);
    pr.value = (q.col(0) - yw.col(0)).squaredNorm() / static_cast<long double>(b);
    return pr;
  };
  return make_case("critic_mse", compare_gradients(f, nets.critic, lg.grads));
}

inline CaseResult check_actor_case(Rng& rng, double fault) {
  int b = 0;
  agent::Batch batch;
  const agent::AgentNets nets = random_agent(rng, b, batch);
  agent::LossGrad lg = agent::actor_loss_grad(nets, nets.actor, batch);
  inject(lg.grads, fault);
  const WideMatrix in = widen(nets.prepare(batch.state_goal));
  const ProbeFn f = [&](const MlpParams& actor) {
    Probe pr;
    const WideMatrix a = forward_with_pattern(actor, in, pr.pattern);
    WideMatrix q_in(in.rows(), in.cols() + a.cols());
    q_in << in, a;
    pr.value = -forward_with_pattern(nets.critic, q_in, pr.pattern).col(0).mean();
    return pr;
  };
  return make_case("actor_loss", compare_gradients(f, nets.actor, lg.grads));
}

// `options.cases` random instances each of: raw MLP, critic loss, actor loss.
inline GradcheckReport run_gradcheck(std::uint64_t seed, const GradcheckOptions& options = {}) {
  GradcheckReport report;
  for (int i = 0; i < options.cases; ++i) {
    Rng rng(derive_seed({seed, static_cast<std::uint64_t>(i), 0x6763ULL}));
    for (auto* check : {&check_mlp_case, &check_critic_case, &check_actor_case}) {
      CaseResult r = check(rng, options.injected_fault);
      r.name += "#" + std::to_string(i);
      report.total.merge(r.stats);
      report.passed = report.passed && r.passed;
      report.cases.push_back(std::move(r));
    }
  }
  return report;
}

}  // namespace evotune::gradcheck

#endif  // EVOTUNE_GRADCHECK_HPP_
