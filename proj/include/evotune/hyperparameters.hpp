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

#ifndef EVOTUNE_HYPERPARAMETERS_HPP_
#define EVOTUNE_HYPERPARAMETERS_HPP_

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "evotune/errors.hpp"

namespace evotune {

// The six tuned scalars. Every field lives in [0, 1]; the learning rates are
// used directly as optimizer step sizes and eta is the exploration noise std
// as a fraction of the maximum action.
struct Hyperparameters {
  double gamma = 0.0;         // discount
  double tau = 0.0;           // polyak coefficient: target <- tau*main + (1-tau)*target
  double alpha_critic = 0.0;  // critic learning rate
  double alpha_actor = 0.0;   // actor learning rate
  double epsilon = 0.0;       // probability of a uniformly random action
  double eta = 0.0;           // Gaussian noise std / max_action

  bool operator==(const Hyperparameters&) const = default;

  void validate() const {
    for (auto [name, v] : named()) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw DomainError(std::string("hyperparameter ") + name + " = " + std::to_string(v) +
                          " outside [0, 1]");
      }
    }
  }

  // Chromosome gene order.
  std::array<std::pair<const char*, double>, 6> named() const {
    return {{{"tau", tau},
             {"gamma", gamma},
             {"alpha_critic", alpha_critic},
             {"alpha_actor", alpha_actor},
             {"epsilon", epsilon},
             {"eta", eta}}};
  }
};

enum class Gene { kTau = 0, kGamma, kAlphaCritic, kAlphaActor, kEpsilon, kEta };
inline constexpr int kGeneCount = 6;
inline constexpr std::array<std::string_view, kGeneCount> kGeneNames = {
    "tau", "gamma", "alpha_critic", "alpha_actor", "epsilon", "eta"};

inline double& gene_ref(Hyperparameters& hp, int gene) {
  switch (static_cast<Gene>(gene)) {
    case Gene::kTau: return hp.tau;
    case Gene::kGamma: return hp.gamma;
    case Gene::kAlphaCritic: return hp.alpha_critic;
    case Gene::kAlphaActor: return hp.alpha_actor;
    case Gene::kEpsilon: return hp.epsilon;
    case Gene::kEta: return hp.eta;
  }
  throw DomainError("gene index out of range");
}

inline double gene_value(const Hyperparameters& hp, int gene) {
  Hyperparameters copy = hp;
  return gene_ref(copy, gene);
}

inline std::optional<int> gene_index(std::string_view name) {
  for (int i = 0; i < kGeneCount; ++i) {
    if (kGeneNames[i] == name) return i;
  }
  return std::nullopt;
}

struct NamedHyperparameters {
  std::string name;
  Hyperparameters hp;
};

// Reference configurations: the stock DDPG+HER defaults and the three
// GA-found sets (shared across simulated tasks, arm fixed, arm random).
inline const std::vector<NamedHyperparameters>& presets() {
  static const std::vector<NamedHyperparameters> kPresets = {
      {"baseline", {.gamma = 0.98, .tau = 0.95, .alpha_critic = 0.001, .alpha_actor = 0.001,
                    .epsilon = 0.3, .eta = 0.2}},
      {"ga-all-envs", {.gamma = 0.928, .tau = 0.484, .alpha_critic = 0.001, .alpha_actor = 0.001,
                       .epsilon = 0.1, .eta = 0.597}},
      {"ga-aubo-fixed", {.gamma = 0.949, .tau = 0.924, .alpha_critic = 0.001,
                         .alpha_actor = 0.001, .epsilon = 0.584, .eta = 0.232}},
      {"ga-aubo-random", {.gamma = 0.988, .tau = 0.924, .alpha_critic = 0.001,
                          .alpha_actor = 0.001, .epsilon = 0.912, .eta = 0.748}},
  };
  return kPresets;
}

inline std::optional<Hyperparameters> find_preset(std::string_view name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p.hp;
  }
  return std::nullopt;
}

}  // namespace evotune

#endif  // EVOTUNE_HYPERPARAMETERS_HPP_
