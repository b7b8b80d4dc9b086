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

// DDPG with hindsight experience replay for goal-conditioned environments.
//
// The actor maps s||g to a tanh-bounded action in [-1, 1]^d (scaled by the
// environment's max action when executed). The critic maps s||g||a_norm to a
// scalar, where a_norm = a / max_action. Targets are polyak-averaged copies.

#ifndef EVOTUNE_AGENT_HPP_
#define EVOTUNE_AGENT_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "evotune/csv.hpp"
#include "evotune/envs.hpp"
#include "evotune/errors.hpp"
#include "evotune/hyperparameters.hpp"
#include "evotune/numkit.hpp"
#include "evotune/rng.hpp"

namespace evotune::agent {

using numkit::Matrix;
using numkit::MlpParams;
using numkit::Vector;
using envs::GoalObservation;

inline Vector concat(const Vector& a, const Vector& b) {
  Vector out(a.size() + b.size());
  out << a, b;
  return out;
}

struct Transition {
  Vector state;
  Vector goal;
  Vector action;
  double reward = -1.0;
  Vector next_state;
  Vector achieved_next;

  Vector state_goal() const { return concat(state, goal); }
  Vector next_state_goal() const { return concat(next_state, goal); }
};

// Fixed-capacity ring of transitions; the oldest entry is overwritten first.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw DomainError("ReplayBuffer: capacity must be >= 1");
    items_.reserve(std::min<std::size_t>(capacity_, 1 << 16));
  }

  void add(Transition t) {
    if (items_.size() < capacity_) {
      items_.push_back(std::move(t));
    } else {
      items_[cursor_] = std::move(t);
    }
    cursor_ = (cursor_ + 1) % capacity_;
  }

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return items_.empty(); }

  // Logical index: 0 is the oldest stored transition.
  const Transition& at(std::size_t i) const {
    if (i >= items_.size()) throw ContractViolation("ReplayBuffer::at out of range");
    const std::size_t start = items_.size() < capacity_ ? 0 : cursor_;
    return items_[(start + i) % capacity_];
  }

  const Transition& slot(std::size_t s) const { return items_.at(s); }

  // Storage slots drawn uniformly with replacement.
  std::vector<std::size_t> sample_slots(std::size_t n, Rng& rng) const {
    if (items_.empty()) throw ContractViolation("ReplayBuffer: sampling from empty buffer");
    std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
    std::vector<std::size_t> out(n);
    for (auto& s : out) s = pick(rng);
    return out;
  }

 private:
  std::size_t capacity_;
  std::size_t cursor_ = 0;
  std::vector<Transition> items_;
};

// Running mean/std over s||g inputs; normalized values are clipped to +-clip.
class RunningNormalizer {
 public:
  explicit RunningNormalizer(Eigen::Index dim, double clip = 5.0, double eps = 1e-2)
      : sum_(Vector::Zero(dim)), sum_sq_(Vector::Zero(dim)), mean_(Vector::Zero(dim)),
        std_(Vector::Ones(dim)), clip_(clip), eps_(eps) {}

  void update(const Vector& x) {
    sum_ += x;
    sum_sq_ += x.cwiseProduct(x);
    count_ += 1.0;
  }

  void recompute() {
    if (count_ == 0.0) return;
    mean_ = sum_ / count_;
    const Vector var = (sum_sq_ / count_ - mean_.cwiseProduct(mean_)).cwiseMax(eps_ * eps_);
    std_ = var.cwiseSqrt();
  }

  Matrix apply(const Matrix& rows) const {
    Matrix out = (rows.rowwise() - mean_.transpose()).array().rowwise() /
                 std_.transpose().array();
    return out.cwiseMax(-clip_).cwiseMin(clip_);
  }

 private:
  Vector sum_, sum_sq_, mean_, std_;
  double count_ = 0.0;
  double clip_;
  double eps_;
};

enum class OptimizerKind { kAdam, kSgd };

struct NetworkConfig {
  std::vector<int> hidden = {64, 64};
  OptimizerKind optimizer = OptimizerKind::kAdam;
  bool normalize_observations = false;
  double final_actor_scale = 1e-2;
};

struct AgentNets {
  MlpParams actor;
  MlpParams critic;
  MlpParams target_actor;
  MlpParams target_critic;
  numkit::AdamState actor_opt;
  numkit::AdamState critic_opt;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  std::optional<RunningNormalizer> normalizer;
  double max_action = 1.0;
  int state_dim = 0;
  int goal_dim = 0;
  int action_dim = 0;

  int observation_dim() const { return state_dim + goal_dim; }

  // s||g rows as fed to the networks.
  Matrix prepare(const Matrix& state_goal) const {
    return normalizer ? normalizer->apply(state_goal) : state_goal;
  }
};

inline AgentNets make_agent_nets(const envs::EnvSpec& spec, const NetworkConfig& config,
                                 Rng& rng) {
  AgentNets n;
  n.state_dim = spec.state_dim;
  n.goal_dim = spec.goal_dim;
  n.action_dim = spec.action_dim;
  n.max_action = spec.max_action;
  n.optimizer = config.optimizer;
  const int obs = spec.state_dim + spec.goal_dim;
  std::vector<int> actor_sizes{obs};
  std::vector<int> critic_sizes{obs + spec.action_dim};
  for (int h : config.hidden) {
    actor_sizes.push_back(h);
    critic_sizes.push_back(h);
  }
  actor_sizes.push_back(spec.action_dim);
  critic_sizes.push_back(1);
  n.actor = numkit::init_mlp(actor_sizes, numkit::Activation::kRelu, numkit::Activation::kTanh,
                             rng, config.final_actor_scale);
  n.critic = numkit::init_mlp(critic_sizes, numkit::Activation::kRelu,
                              numkit::Activation::kIdentity, rng);
  n.target_actor = n.actor;
  n.target_critic = n.critic;
  n.actor_opt = numkit::AdamState::for_params(n.actor);
  n.critic_opt = numkit::AdamState::for_params(n.critic);
  if (config.normalize_observations) n.normalizer.emplace(obs);
  return n;
}

// Minibatch in network layout. Actions are normalized to [-1, 1].
struct Batch {
  Matrix state_goal;
  Matrix actions;
  Vector rewards;
  Matrix next_state_goal;

  Eigen::Index size() const { return rewards.size(); }
};

inline Batch make_batch(const ReplayBuffer& buffer, std::span<const std::size_t> slots,
                        double max_action) {
  if (slots.empty()) throw ContractViolation("make_batch: empty batch");
  const Transition& first = buffer.slot(slots[0]);
  const Eigen::Index b = static_cast<Eigen::Index>(slots.size());
  const Eigen::Index sd = first.state.size();
  const Eigen::Index gd = first.goal.size();
  const Eigen::Index ad = first.action.size();
  Batch out{Matrix(b, sd + gd), Matrix(b, ad), Vector(b), Matrix(b, sd + gd)};
  for (Eigen::Index i = 0; i < b; ++i) {
    const Transition& t = buffer.slot(slots[static_cast<std::size_t>(i)]);
    out.state_goal.row(i).head(sd) = t.state.transpose();
    out.state_goal.row(i).tail(gd) = t.goal.transpose();
    out.actions.row(i) = t.action.transpose() / max_action;
    out.rewards[i] = t.reward;
    out.next_state_goal.row(i).head(sd) = t.next_state.transpose();
    out.next_state_goal.row(i).tail(gd) = t.goal.transpose();
  }
  return out;
}

inline Matrix critic_input(const AgentNets& nets, const Matrix& state_goal,
                           const Matrix& actions_norm) {
  Matrix in(state_goal.rows(), state_goal.cols() + actions_norm.cols());
  in << nets.prepare(state_goal), actions_norm;
  return in;
}

// Deterministic actor output for one observation, in environment units.
inline Vector actor_action(const AgentNets& nets, const GoalObservation& obs) {
  const Matrix sg = concat(obs.state, obs.desired_goal).transpose();
  const Matrix a = numkit::mlp_predict(nets.actor, nets.prepare(sg));
  return nets.max_action * a.row(0).transpose();
}

// Exploratory policy: a uniform random action with probability epsilon,
// otherwise the actor output plus N(0, (eta*max_action)^2) noise, clipped.
inline Vector behavioral_action(const AgentNets& nets, const GoalObservation& obs,
                                double epsilon, double eta, Rng& rng) {
  const double m = nets.max_action;
  if (bernoulli(rng, epsilon)) {
    Vector a(nets.action_dim);
    for (int i = 0; i < nets.action_dim; ++i) a[i] = uniform(rng, -m, m);
    return a;
  }
  Vector a = actor_action(nets, obs);
  for (int i = 0; i < nets.action_dim; ++i) a[i] += eta * m * standard_normal(rng);
  return a.cwiseMax(-m).cwiseMin(m);
}

// Lowest achievable discounted return under 0/-1 rewards; the 1e-8 guard only
// matters as gamma approaches 1.
inline double target_floor(double gamma) { return -1.0 / std::max(1.0 - gamma, 1e-8); }

// y_i = r_i + gamma * Q'(s'_i||g, mu'(s'_i||g)), clipped to [-1/(1-gamma+1e-8), 0].
inline Vector critic_target(const AgentNets& nets, const Batch& batch, double gamma) {
  if (batch.size() == 0) throw ContractViolation("critic_target: empty batch");
  const Matrix next_in = nets.prepare(batch.next_state_goal);
  const Matrix next_actions = numkit::mlp_predict(nets.target_actor, next_in);
  Matrix q_in(next_in.rows(), next_in.cols() + next_actions.cols());
  q_in << next_in, next_actions;
  const Matrix q_next = numkit::mlp_predict(nets.target_critic, q_in);
  Vector y = batch.rewards + gamma * q_next.col(0);
  return y.cwiseMax(target_floor(gamma)).cwiseMin(0.0);
}

struct LossGrad {
  double loss = 0.0;
  MlpParams grads;
};

// Mean squared error between Q(s||g, a) and the fixed targets.
inline LossGrad critic_loss_grad(const AgentNets& nets, const MlpParams& critic,
                                 const Batch& batch, const Vector& targets) {
  const auto fwd = numkit::mlp_forward(critic, critic_input(nets, batch.state_goal, batch.actions));
  const Vector diff = fwd.output.col(0) - targets;
  const double b = static_cast<double>(batch.size());
  LossGrad r;
  r.loss = diff.squaredNorm() / b;
  const Matrix upstream = (2.0 / b) * diff;
  r.grads = numkit::mlp_backward(critic, fwd.cache, upstream).param_grads;
  return r;
}

inline double critic_loss(const AgentNets& nets, const MlpParams& critic, const Batch& batch,
                          const Vector& targets) {
  const Matrix q =
      numkit::mlp_predict(critic, critic_input(nets, batch.state_goal, batch.actions));
  return (q.col(0) - targets).squaredNorm() / static_cast<double>(batch.size());
}

// -mean Q(s||g, mu(s||g)); gradients w.r.t. the actor only.
inline LossGrad actor_loss_grad(const AgentNets& nets, const MlpParams& actor,
                                const Batch& batch) {
  const Matrix in = nets.prepare(batch.state_goal);
  const auto actor_fwd = numkit::mlp_forward(actor, in);
  Matrix q_in(in.rows(), in.cols() + actor_fwd.output.cols());
  q_in << in, actor_fwd.output;
  const auto critic_fwd = numkit::mlp_forward(nets.critic, q_in);
  const double b = static_cast<double>(batch.size());
  LossGrad r;
  r.loss = -critic_fwd.output.col(0).mean();
  const Matrix upstream = Matrix::Constant(in.rows(), 1, -1.0 / b);
  const auto critic_back = numkit::mlp_backward(nets.critic, critic_fwd.cache, upstream);
  const Matrix action_grad = critic_back.input_grad.rightCols(actor_fwd.output.cols());
  r.grads = numkit::mlp_backward(actor, actor_fwd.cache, action_grad).param_grads;
  return r;
}

inline double actor_loss(const AgentNets& nets, const MlpParams& actor, const Batch& batch) {
  const Matrix in = nets.prepare(batch.state_goal);
  const Matrix a = numkit::mlp_predict(actor, in);
  Matrix q_in(in.rows(), in.cols() + a.cols());
  q_in << in, a;
  return -numkit::mlp_predict(nets.critic, q_in).col(0).mean();
}

namespace detail {

inline void apply_update(OptimizerKind kind, MlpParams& params, const MlpParams& grads,
                         numkit::AdamState& state, double lr) {
  if (kind == OptimizerKind::kAdam) {
    numkit::adam_update(params, grads, state, lr);
  } else {
    numkit::sgd_update(params, grads, lr);
  }
}

}  // namespace detail

// One optimizer step on the critic. Returns the pre-update loss.
inline double critic_update(AgentNets& nets, const Batch& batch, double gamma, double lr) {
  const Vector y = critic_target(nets, batch, gamma);
  LossGrad lg = critic_loss_grad(nets, nets.critic, batch, y);
  if (!std::isfinite(lg.loss)) throw NumericError("critic_update: non-finite loss");
  detail::apply_update(nets.optimizer, nets.critic, lg.grads, nets.critic_opt, lr);
  return lg.loss;
}

// One optimizer step on the actor with the critic held fixed. Returns the pre-update loss.
inline double actor_update(AgentNets& nets, const Batch& batch, double lr) {
  LossGrad lg = actor_loss_grad(nets, nets.actor, batch);
  if (!std::isfinite(lg.loss)) throw NumericError("actor_update: non-finite loss");
  detail::apply_update(nets.optimizer, nets.actor, lg.grads, nets.actor_opt, lr);
  return lg.loss;
}

inline void polyak_blend(MlpParams& target, const MlpParams& main, double tau) {
  numkit::check_same_shape(target, main, "polyak_update");
  for (std::size_t k = 0; k < target.layers.size(); ++k) {
    auto& t = target.layers[k];
    const auto& m = main.layers[k];
    t.weight = tau * m.weight + (1.0 - tau) * t.weight;
    t.bias = tau * m.bias + (1.0 - tau) * t.bias;
  }
}

// target <- tau * main + (1 - tau) * target, for actor and critic.
inline void polyak_update(AgentNets& nets, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw DomainError("polyak_update: tau outside [0, 1]");
  polyak_blend(nets.target_actor, nets.actor, tau);
  polyak_blend(nets.target_critic, nets.critic, tau);
}

// Hindsight relabeling with the "future" strategy: for each t, her_k goals
// are drawn from achieved_next[u-1] with u uniform in (t, T].
inline std::vector<Transition> her_relabel(const std::vector<Transition>& episode, int her_k,
                                           const envs::GoalPredicate& predicate, Rng& rng) {
  if (episode.empty()) throw ContractViolation("her_relabel: empty episode");
  if (her_k < 0) throw DomainError("her_relabel: her_k must be >= 0");
  const std::size_t horizon = episode.size();
  std::vector<Transition> out;
  out.reserve(horizon * static_cast<std::size_t>(her_k));
  for (std::size_t t = 0; t < horizon; ++t) {
    std::uniform_int_distribution<std::size_t> future(t + 1, horizon);
    for (int k = 0; k < her_k; ++k) {
      const std::size_t u = future(rng);
      Transition r = episode[t];
      r.goal = episode[u - 1].achieved_next;
      r.reward = predicate.compute_reward(episode[t].achieved_next, r.goal);
      out.push_back(std::move(r));
    }
  }
  return out;
}

using Policy = std::function<Vector(const GoalObservation&, Rng&)>;

struct Episode {
  std::vector<Transition> transitions;
  double total_reward = 0.0;
  bool success = false;
};

inline Episode rollout(envs::Env& env, const Policy& policy, Rng& rng) {
  Episode ep;
  GoalObservation obs = env.reset(rng);
  ep.transitions.reserve(static_cast<std::size_t>(env.spec().episode_length));
  while (true) {
    Vector a = policy(obs, rng);
    envs::StepResult r = env.step(a);
    ep.total_reward += r.reward;
    ep.success = ep.success || r.is_success;
    ep.transitions.push_back(Transition{obs.state, obs.desired_goal, std::move(a), r.reward,
                                        r.observation.state, r.observation.achieved_goal});
    obs = std::move(r.observation);
    if (r.done) break;
  }
  return ep;
}

struct EvalResult {
  double success_rate = 0.0;
  double mean_total_reward = 0.0;
};

inline EvalResult evaluate_policy(const Policy& policy, envs::Env& env, int eval_rollouts,
                                  Rng& rng) {
  if (eval_rollouts < 1) throw DomainError("evaluate: eval_rollouts must be >= 1");
  int successes = 0;
  double reward = 0.0;
  for (int i = 0; i < eval_rollouts; ++i) {
    const Episode ep = rollout(env, policy, rng);
    successes += ep.success ? 1 : 0;
    reward += ep.total_reward;
  }
  return {static_cast<double>(successes) / eval_rollouts, reward / eval_rollouts};
}

inline Policy deterministic_policy(const AgentNets& nets) {
  return [&nets](const GoalObservation& obs, Rng&) { return actor_action(nets, obs); };
}

// Success rate of the noise-free actor.
inline EvalResult evaluate(const AgentNets& nets, envs::Env& env, int eval_rollouts, Rng& rng) {
  return evaluate_policy(deterministic_policy(nets), env, eval_rollouts, rng);
}

enum class SuccessRule { kFirstReach, kConsecutivePerfect };

inline std::string to_string(SuccessRule rule) {
  return rule == SuccessRule::kFirstReach ? "first_reach" : "consecutive_perfect";
}

inline SuccessRule parse_success_rule(std::string_view text) {
  if (text == "first_reach") return SuccessRule::kFirstReach;
  if (text == "consecutive_perfect") return SuccessRule::kConsecutivePerfect;
  throw ConfigError("unknown success rule '" + std::string(text) +
                    "' (first_reach|consecutive_perfect)");
}

struct TrainSchedule {
  int max_epochs = 30;
  int cycles_per_epoch = 10;
  int episodes_per_cycle = 10;               // M
  std::optional<int> episode_length;         // T; environment default when unset
  int opt_steps_per_cycle = 40;              // N
  int batch_size = 128;
  int eval_rollouts = 20;
  int her_k = 4;
  double success_threshold = 0.85;
  SuccessRule success_rule = SuccessRule::kFirstReach;
  int consecutive_epochs = 10;
  std::size_t buffer_capacity = 100000;

  void validate() const {
    auto positive = [](int v, const char* name) {
      if (v < 1) throw ConfigError(std::string(name) + " must be >= 1");
    };
    positive(max_epochs, "max_epochs");
    positive(cycles_per_epoch, "cycles_per_epoch");
    positive(episodes_per_cycle, "episodes_per_cycle");
    if (episode_length) positive(*episode_length, "episode_length");
    if (opt_steps_per_cycle < 0) throw ConfigError("opt_steps_per_cycle must be >= 0");
    positive(batch_size, "batch_size");
    positive(eval_rollouts, "eval_rollouts");
    positive(consecutive_epochs, "consecutive_epochs");
    if (her_k < 0) throw ConfigError("her_k must be >= 0");
    if (!(success_threshold > 0.0 && success_threshold <= 1.0)) {
      throw ConfigError("success_threshold must be in (0, 1]");
    }
    if (buffer_capacity < 1) throw ConfigError("buffer_capacity must be >= 1");
  }
};

// Consumes per-epoch success rates and reports the epoch at which the rule fires.
class SuccessRuleTracker {
 public:
  SuccessRuleTracker(SuccessRule rule, double threshold, int consecutive = 10)
      : rule_(rule), threshold_(threshold), consecutive_(consecutive) {}

  // Returns the 1-based epoch index when the rule is satisfied by this evaluation.
  std::optional<int> observe(double success_rate) {
    ++epoch_;
    if (rule_ == SuccessRule::kFirstReach) {
      if (success_rate >= threshold_) return epoch_;
      return std::nullopt;
    }
    streak_ = success_rate == 1.0 ? streak_ + 1 : 0;
    if (streak_ >= consecutive_) return epoch_;
    return std::nullopt;
  }

 private:
  SuccessRule rule_;
  double threshold_;
  int consecutive_;
  int epoch_ = 0;
  int streak_ = 0;
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double success_rate = 0.0;
  double mean_total_reward = 0.0;
  std::int64_t episodes_cum = 0;
  std::int64_t steps_cum = 0;
  double wall_s = 0.0;

  bool operator==(const EpochRecord&) const = default;
};

enum class Outcome { kReached, kExhausted };

struct TrainingTrace {
  std::vector<EpochRecord> records;
  Outcome outcome = Outcome::kExhausted;
  int epochs_to_success = 0;  // valid when outcome == kReached
  bool failed = false;
  std::string failure;

  bool reached() const { return outcome == Outcome::kReached; }
  int epochs_completed() const { return static_cast<int>(records.size()); }
  double wall_s() const { return records.empty() ? 0.0 : records.back().wall_s; }

  bool operator==(const TrainingTrace&) const = default;
};

struct AgentState {
  AgentNets nets;
  ReplayBuffer buffer;
  std::int64_t episodes = 0;
  std::int64_t steps = 0;
  int epochs = 0;
};

inline AgentState make_agent_state(const envs::EnvSpec& spec, const TrainSchedule& schedule,
                                   const NetworkConfig& network, Rng& rng) {
  return AgentState{make_agent_nets(spec, network, rng), ReplayBuffer(schedule.buffer_capacity)};
}

// One epoch: cycles of (M behavioral episodes stored with HER relabels, then N
// optimization steps of critic, actor, polyak), followed by evaluation.
// `eval_policy` replaces the learned policy during evaluation when set.
inline EpochRecord run_epoch(AgentState& state, envs::Env& env, const TrainSchedule& schedule,
                             const Hyperparameters& hp, Rng& rng,
                             const Policy* eval_policy = nullptr) {
  AgentNets& nets = state.nets;
  const Policy behavioral = [&](const GoalObservation& obs, Rng& r) {
    return behavioral_action(nets, obs, hp.epsilon, hp.eta, r);
  };
  for (int cycle = 0; cycle < schedule.cycles_per_epoch; ++cycle) {
    for (int e = 0; e < schedule.episodes_per_cycle; ++e) {
      Episode ep = rollout(env, behavioral, rng);
      state.episodes += 1;
      state.steps += static_cast<std::int64_t>(ep.transitions.size());
      std::vector<Transition> relabeled =
          her_relabel(ep.transitions, schedule.her_k, env.goal_predicate(), rng);
      if (nets.normalizer) {
        for (const Transition& t : ep.transitions) nets.normalizer->update(t.state_goal());
        for (const Transition& t : relabeled) nets.normalizer->update(t.state_goal());
        nets.normalizer->recompute();
      }
      for (Transition& t : ep.transitions) state.buffer.add(std::move(t));
      for (Transition& t : relabeled) state.buffer.add(std::move(t));
    }
    for (int n = 0; n < schedule.opt_steps_per_cycle; ++n) {
      const auto slots =
          state.buffer.sample_slots(static_cast<std::size_t>(schedule.batch_size), rng);
      const Batch batch = make_batch(state.buffer, slots, nets.max_action);
      critic_update(nets, batch, hp.gamma, hp.alpha_critic);
      actor_update(nets, batch, hp.alpha_actor);
      polyak_update(nets, hp.tau);
    }
  }
  state.epochs += 1;
  const EvalResult eval = eval_policy
                              ? evaluate_policy(*eval_policy, env, schedule.eval_rollouts, rng)
                              : evaluate(nets, env, schedule.eval_rollouts, rng);
  EpochRecord rec;
  rec.epoch = state.epochs;
  rec.success_rate = eval.success_rate;
  rec.mean_total_reward = eval.mean_total_reward;
  rec.episodes_cum = state.episodes;
  rec.steps_cum = state.steps;
  return rec;
}

struct TrainOptions {
  NetworkConfig network;
  bool record_wall_time = true;
  std::optional<Policy> eval_policy;
  std::function<void(const EpochRecord&)> on_epoch;
};

inline std::unique_ptr<envs::Env> make_training_env(std::string_view name,
                                                    std::optional<envs::StartGoalMode> mode,
                                                    const TrainSchedule& schedule) {
  auto probe = envs::make_env(name, mode);
  const auto m = mode.value_or(probe->spec().mode);
  if (!schedule.episode_length) return probe;
  const int t = *schedule.episode_length;
  if (name == "point-reach") return std::make_unique<envs::PointReach2D>(m, t);
  if (name == "arm-reach") return std::make_unique<envs::ArmReach4>(m, t);
  return std::make_unique<envs::PlanarSlide>(m, t);
}

// Trains a fresh agent until the success rule fires or max_epochs is spent.
// Numeric failures end the run as exhausted with `failed` set.
inline TrainingTrace train_until(const envs::Env& prototype, const Hyperparameters& hp,
                                 const TrainSchedule& schedule, std::uint64_t seed,
                                 const TrainOptions& options = {}) {
  schedule.validate();
  hp.validate();
  std::unique_ptr<envs::Env> env = prototype.clone();
  Rng rng(derive_seed({seed, 0x747261696eULL}));
  AgentState state = make_agent_state(env->spec(), schedule, options.network, rng);
  SuccessRuleTracker tracker(schedule.success_rule, schedule.success_threshold,
                             schedule.consecutive_epochs);
  TrainingTrace trace;
  const auto start = std::chrono::steady_clock::now();
  const Policy* eval_policy = options.eval_policy ? &*options.eval_policy : nullptr;
  for (int epoch = 0; epoch < schedule.max_epochs; ++epoch) {
    EpochRecord rec;
    try {
      rec = run_epoch(state, *env, schedule, hp, rng, eval_policy);
    } catch (const NumericError& e) {
      trace.failed = true;
      trace.failure = e.what();
      break;
    }
    if (options.record_wall_time) {
      rec.wall_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    trace.records.push_back(rec);
    if (options.on_epoch) options.on_epoch(rec);
    if (auto fired = tracker.observe(rec.success_rate)) {
      trace.outcome = Outcome::kReached;
      trace.epochs_to_success = *fired;
      break;
    }
  }
  return trace;
}

inline constexpr const char* kTraceCsvHeader =
    "epoch,success_rate,mean_total_reward,episodes_cum,steps_cum,wall_s";

inline void write_trace_csv(std::ostream& os, const TrainingTrace& trace) {
  os << kTraceCsvHeader << '\n';
  for (const EpochRecord& r : trace.records) {
    os << r.epoch << ',' << csv::num(r.success_rate) << ',' << csv::num(r.mean_total_reward)
       << ',' << r.episodes_cum << ',' << r.steps_cum << ',' << csv::fixed(r.wall_s, 3) << '\n';
  }
}

inline std::vector<EpochRecord> read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || csv::split(line) != csv::split(kTraceCsvHeader)) {
    throw ConfigError("trace csv: unexpected header");
  }
  std::vector<EpochRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto c = csv::split(line);
    if (c.size() != 6) throw ConfigError("trace csv: expected 6 columns");
    out.push_back({static_cast<int>(csv::parse_int(c[0])), csv::parse_double(c[1]),
                   csv::parse_double(c[2]), csv::parse_int(c[3]), csv::parse_int(c[4]),
                   csv::parse_double(c[5])});
  }
  return out;
}

// Re-applies the success rule to a recorded success-rate series.
inline TrainingTrace replay_rule(std::vector<EpochRecord> records, const TrainSchedule& schedule) {
  TrainingTrace trace;
  SuccessRuleTracker tracker(schedule.success_rule, schedule.success_threshold,
                             schedule.consecutive_epochs);
  for (const EpochRecord& r : records) {
    trace.records.push_back(r);
    if (auto fired = tracker.observe(r.success_rate)) {
      trace.outcome = Outcome::kReached;
      trace.epochs_to_success = *fired;
      break;
    }
  }
  return trace;
}

// Scripted controller for reach tasks: commands the clipped delta that moves
// the achieved goal straight at the desired goal.
inline Policy reach_expert(double step_scale, double max_action = 1.0) {
  return [step_scale, max_action](const GoalObservation& obs, Rng&) -> Vector {
    const Vector delta = (obs.desired_goal - obs.achieved_goal) / step_scale;
    return delta.cwiseMax(-max_action).cwiseMin(max_action);
  };
}

}  // namespace evotune::agent

#endif  // EVOTUNE_AGENT_HPP_
