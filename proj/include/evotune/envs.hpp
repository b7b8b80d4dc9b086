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

// Goal-conditioned sparse-reward environments.
//
//   point-reach   2D point moved by bounded velocity commands.
//   arm-reach     4-joint kinematic arm driven by bounded joint deltas.
//   planar-slide  puck receiving a single impulse, then sliding under friction.

#ifndef EVOTUNE_ENVS_HPP_
#define EVOTUNE_ENVS_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "evotune/errors.hpp"
#include "evotune/rng.hpp"

namespace evotune::envs {

using Vector = Eigen::VectorXd;

enum class StartGoalMode { kFixed, kRandom };

inline std::string to_string(StartGoalMode mode) {
  return mode == StartGoalMode::kFixed ? "fixed" : "random";
}

inline StartGoalMode parse_mode(std::string_view text) {
  if (text == "fixed") return StartGoalMode::kFixed;
  if (text == "random") return StartGoalMode::kRandom;
  throw ConfigError("unknown start/goal mode '" + std::string(text) + "' (fixed|random)");
}

struct GoalObservation {
  Vector state;
  Vector achieved_goal;
  Vector desired_goal;
};

struct StepResult {
  GoalObservation observation;
  double reward = -1.0;
  bool done = false;
  bool is_success = false;
};

struct EnvSpec {
  int state_dim = 0;
  int goal_dim = 0;
  int action_dim = 0;
  double max_action = 1.0;
  int episode_length = 50;
  StartGoalMode mode = StartGoalMode::kRandom;
};

enum class GoalNorm { kL1, kL2 };

// Stateless success predicate; reward is 0 when met, -1 otherwise.
struct GoalPredicate {
  GoalNorm norm = GoalNorm::kL2;
  double threshold = 0.05;

  double distance(const Vector& achieved, const Vector& desired) const {
    if (achieved.size() != desired.size()) {
      throw ShapeError("goal dimension mismatch: " + std::to_string(achieved.size()) + " vs " +
                       std::to_string(desired.size()));
    }
    const Vector d = achieved - desired;
    return norm == GoalNorm::kL1 ? d.lpNorm<1>() : d.norm();
  }

  bool is_goal_met(const Vector& achieved, const Vector& desired) const {
    return distance(achieved, desired) < threshold;
  }

  double compute_reward(const Vector& achieved, const Vector& desired) const {
    return is_goal_met(achieved, desired) ? 0.0 : -1.0;
  }
};

class Env {
 public:
  virtual ~Env() = default;

  virtual std::string name() const = 0;
  virtual std::unique_ptr<Env> clone() const = 0;

  const EnvSpec& spec() const { return spec_; }
  const GoalPredicate& goal_predicate() const { return predicate_; }

  bool is_goal_met(const Vector& achieved, const Vector& desired) const {
    return predicate_.is_goal_met(achieved, desired);
  }
  double compute_reward(const Vector& achieved, const Vector& desired) const {
    return predicate_.compute_reward(achieved, desired);
  }

  // True when every state component lies inside the declared bounds.
  virtual bool state_in_bounds(const Vector& state) const = 0;

  GoalObservation reset(Rng& rng) {
    reset_state(rng);
    steps_ = 0;
    active_ = true;
    return observe();
  }

  StepResult step(const Vector& action) {
    if (!active_) throw ContractViolation(name() + ": step() called before reset() or after done");
    if (action.size() != spec_.action_dim) throw ShapeError(name() + ": action dimension mismatch");
    if (!action.allFinite()) throw NumericError(name() + ": non-finite action");
    const Vector clipped = action.cwiseMax(-spec_.max_action).cwiseMin(spec_.max_action);
    advance(clipped);
    ++steps_;
    StepResult r;
    r.observation = observe();
    r.reward = compute_reward(r.observation.achieved_goal, r.observation.desired_goal);
    r.is_success = r.reward == 0.0;
    r.done = steps_ == spec_.episode_length;
    if (r.done) active_ = false;
    return r;
  }

  int steps_taken() const { return steps_; }
  const Vector& state() const { return state_; }
  const Vector& desired_goal() const { return goal_; }

 protected:
  Env(EnvSpec spec, GoalPredicate predicate) : spec_(spec), predicate_(predicate) {
    if (spec_.episode_length < 1) throw DomainError("episode_length must be >= 1");
  }

  virtual void reset_state(Rng& rng) = 0;
  virtual void advance(const Vector& clipped_action) = 0;
  virtual Vector achieved_goal() const = 0;

  GoalObservation observe() const { return {state_, achieved_goal(), goal_}; }

  Vector state_;
  Vector goal_;

 private:
  EnvSpec spec_;
  GoalPredicate predicate_;
  int steps_ = 0;
  bool active_ = false;
};

inline Vector uniform_vector(Rng& rng, int dim, double lo, double hi) {
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = uniform(rng, lo, hi);
  return v;
}

class PointReach2D final : public Env {
 public:
  static constexpr double kArena = 1.0;
  static constexpr double kStepScale = 0.05;

  explicit PointReach2D(StartGoalMode mode = StartGoalMode::kRandom, int episode_length = 50)
      : Env({2, 2, 2, 1.0, episode_length, mode}, {GoalNorm::kL2, 0.05}) {}

  std::string name() const override { return "point-reach"; }
  std::unique_ptr<Env> clone() const override { return std::make_unique<PointReach2D>(*this); }

  bool state_in_bounds(const Vector& s) const override {
    return s.size() == 2 && (s.array().abs() <= kArena).all();
  }

  static Vector fixed_start() { return Vector::Constant(2, -0.5); }
  static Vector fixed_goal() { return Vector::Constant(2, 0.5); }

 protected:
  void reset_state(Rng& rng) override {
    if (spec().mode == StartGoalMode::kFixed) {
      state_ = fixed_start();
      goal_ = fixed_goal();
      return;
    }
    goal_ = uniform_vector(rng, 2, -kArena, kArena);
    do {
      state_ = uniform_vector(rng, 2, -kArena, kArena);
    } while (is_goal_met(state_, goal_));
  }

  void advance(const Vector& a) override {
    state_ = (state_ + kStepScale * a).cwiseMax(-kArena).cwiseMin(kArena);
  }

  Vector achieved_goal() const override { return state_; }
};

class ArmReach4 final : public Env {
 public:
  static constexpr double kJointLimit = 1.7;
  static constexpr double kJointDelta = 0.1;

  explicit ArmReach4(StartGoalMode mode = StartGoalMode::kFixed, int episode_length = 50)
      : Env({4, 4, 4, 1.0, episode_length, mode}, {GoalNorm::kL1, 0.1}) {}

  std::string name() const override { return "arm-reach"; }
  std::unique_ptr<Env> clone() const override { return std::make_unique<ArmReach4>(*this); }

  bool state_in_bounds(const Vector& s) const override {
    return s.size() == 4 && (s.array().abs() <= kJointLimit).all();
  }

  // Upright rest pose and the target joint configuration used in fixed mode.
  static Vector upright() { return Vector::Zero(4); }
  static Vector fixed_target() {
    Vector g(4);
    g << -0.503, 0.605, -1.676, 1.391;
    return g;
  }

 protected:
  void reset_state(Rng& rng) override {
    if (spec().mode == StartGoalMode::kFixed) {
      state_ = upright();
      goal_ = fixed_target();
      return;
    }
    goal_ = uniform_vector(rng, 4, -kJointLimit, kJointLimit);
    do {
      state_ = uniform_vector(rng, 4, -kJointLimit, kJointLimit);
    } while (is_goal_met(state_, goal_));
  }

  void advance(const Vector& a) override {
    state_ = (state_ + kJointDelta * a).cwiseMax(-kJointLimit).cwiseMin(kJointLimit);
  }

  Vector achieved_goal() const override { return state_; }
};

// State layout: [puck_x, puck_y, vel_x, vel_y, released]. The first action
// sets the puck velocity; every later action is ignored.
class PlanarSlide final : public Env {
 public:
  static constexpr double kArena = 1.0;
  static constexpr double kImpulseScale = 0.1;
  static constexpr double kFriction = 0.95;

  explicit PlanarSlide(StartGoalMode mode = StartGoalMode::kRandom, int episode_length = 30)
      : Env({5, 2, 2, 1.0, episode_length, mode}, {GoalNorm::kL2, 0.05}) {}

  std::string name() const override { return "planar-slide"; }
  std::unique_ptr<Env> clone() const override { return std::make_unique<PlanarSlide>(*this); }

  bool state_in_bounds(const Vector& s) const override {
    if (s.size() != 5) return false;
    const double vmax = kImpulseScale * spec().max_action;
    return std::abs(s[0]) <= kArena && std::abs(s[1]) <= kArena && std::abs(s[2]) <= vmax &&
           std::abs(s[3]) <= vmax && (s[4] == 0.0 || s[4] == 1.0);
  }

  static Vector fixed_start() {
    Vector p(2);
    p << -0.6, 0.0;
    return p;
  }
  static Vector fixed_goal() {
    Vector p(2);
    p << 0.4, 0.0;
    return p;
  }

 protected:
  void reset_state(Rng& rng) override {
    Vector puck;
    if (spec().mode == StartGoalMode::kFixed) {
      puck = fixed_start();
      goal_ = fixed_goal();
    } else {
      goal_ = uniform_vector(rng, 2, -0.9, 0.9);
      do {
        puck = uniform_vector(rng, 2, -0.5, 0.5);
      } while (is_goal_met(puck, goal_));
    }
    state_ = Vector::Zero(5);
    state_.head<2>() = puck;
  }

  void advance(const Vector& a) override {
    if (state_[4] == 0.0) {
      state_.segment<2>(2) = kImpulseScale * a;
      state_[4] = 1.0;
    }
    for (int i = 0; i < 2; ++i) {
      double p = state_[i] + state_[2 + i];
      if (std::abs(p) > kArena) {
        p = std::clamp(p, -kArena, kArena);
        state_[2 + i] = 0.0;
      }
      state_[i] = p;
      state_[2 + i] *= kFriction;
    }
  }

  Vector achieved_goal() const override { return state_.head<2>(); }
};

inline constexpr std::array<std::string_view, 3> kEnvNames = {"point-reach", "arm-reach",
                                                               "planar-slide"};

inline StartGoalMode default_mode(std::string_view name) {
  return name == "arm-reach" ? StartGoalMode::kFixed : StartGoalMode::kRandom;
}

inline std::unique_ptr<Env> make_env(std::string_view name,
                                     std::optional<StartGoalMode> mode = std::nullopt) {
  const StartGoalMode m = mode.value_or(default_mode(name));
  if (name == "point-reach") return std::make_unique<PointReach2D>(m);
  if (name == "arm-reach") return std::make_unique<ArmReach4>(m);
  if (name == "planar-slide") return std::make_unique<PlanarSlide>(m);
  throw ConfigError("unknown environment '" + std::string(name) +
                    "' (point-reach|arm-reach|planar-slide)");
}

}  // namespace evotune::envs

#endif  // EVOTUNE_ENVS_HPP_
