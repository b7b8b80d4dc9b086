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

// Command-line front end. Subcommands:
//   tune       GA campaign over training runs
//   train      one training run for a preset or explicit values
//   compare    several presets over a seed list
//   gradcheck  finite-difference verification of the training gradients
//   ga-sanity  GA on a synthetic objective with a known optimum
//   presets    list shipped hyperparameter presets
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

#ifndef EVOTUNE_COMMANDS_HPP_
#define EVOTUNE_COMMANDS_HPP_

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evotune/agent.hpp"
#include "evotune/csv.hpp"
#include "evotune/errors.hpp"
#include "evotune/ga.hpp"
#include "evotune/gradcheck.hpp"
#include "evotune/hyperparameters.hpp"
#include "evotune/tuner.hpp"

namespace evotune::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

inline fs::path output_root() {
  if (const char* root = std::getenv("EVOTUNE_OUT"); root && *root) return root;
  return "runs";
}

// Parses "0..9", "3" or "0,2,5".
inline std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  if (auto dots = text.find(".."); dots != std::string::npos) {
    const long long lo = csv::parse_int(text.substr(0, dots));
    const long long hi = csv::parse_int(text.substr(dots + 2));
    if (lo < 0 || hi < lo) throw ConfigError("seed range must be lo..hi with 0 <= lo <= hi");
    for (long long s = lo; s <= hi; ++s) out.push_back(static_cast<std::uint64_t>(s));
    return out;
  }
  for (const auto& cell : csv::split(text)) {
    const long long s = csv::parse_int(tuner::trim(cell));
    if (s < 0) throw ConfigError("seeds must be >= 0");
    out.push_back(static_cast<std::uint64_t>(s));
  }
  return out;
}

// Six comma-separated values in the order gamma,tau,alpha_actor,alpha_critic,epsilon,eta.
inline Hyperparameters parse_values(const std::string& text) {
  const auto cells = csv::split(text);
  if (cells.size() != 6) {
    throw ConfigError("--values expects gamma,tau,alpha_actor,alpha_critic,epsilon,eta");
  }
  Hyperparameters hp;
  hp.gamma = csv::parse_double(tuner::trim(cells[0]));
  hp.tau = csv::parse_double(tuner::trim(cells[1]));
  hp.alpha_actor = csv::parse_double(tuner::trim(cells[2]));
  hp.alpha_critic = csv::parse_double(tuner::trim(cells[3]));
  hp.epsilon = csv::parse_double(tuner::trim(cells[4]));
  hp.eta = csv::parse_double(tuner::trim(cells[5]));
  try {
    hp.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return hp;
}

inline std::string describe(const Hyperparameters& hp) {
  return "gamma=" + csv::num(hp.gamma) + " tau=" + csv::num(hp.tau) +
         " alpha_actor=" + csv::num(hp.alpha_actor) + " alpha_critic=" + csv::num(hp.alpha_critic) +
         " epsilon=" + csv::num(hp.epsilon) + " eta=" + csv::num(hp.eta);
}

// Collects flag values as config-file keys so flags and files share one path.
class SettingFlags {
 public:
  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { flags_[key] = v; }, help);
  }

  void add_schedule(CLI::App* app) {
    add(app, "--env", "env", "environment: point-reach | arm-reach | planar-slide");
    add(app, "--mode", "mode", "start/goal mode: fixed | random");
    add(app, "--max-epochs", "max_epochs", "epoch cap per training run");
    add(app, "--cycles", "cycles", "cycles per epoch");
    add(app, "--episodes", "episodes", "episodes per cycle (M)");
    add(app, "--episode-length", "episode_length", "episode length T");
    add(app, "--opt-steps", "opt_steps", "optimization steps per cycle (N)");
    add(app, "--batch", "batch", "minibatch size");
    add(app, "--eval-rollouts", "eval_rollouts", "evaluation rollouts per epoch");
    add(app, "--her-k", "her_k", "relabeled goals per transition");
    add(app, "--threshold", "threshold", "success-rate threshold");
    add(app, "--success-rule", "success_rule", "first_reach | consecutive_perfect");
    add(app, "--consecutive", "consecutive", "perfect epochs required by consecutive_perfect");
    add(app, "--buffer", "buffer", "replay buffer capacity");
    add(app, "--optimizer", "optimizer", "adam | sgd");
    add(app, "--hidden", "hidden", "hidden layer widths, e.g. 64,64");
    add(app, "--workers", "workers", "parallel training runs");
    add(app, "--seed", "seed", "seed");
    add(app, "--out", "out_dir", "output directory");
    app->add_option("--config", config_path_, "key=value config file");
    app->add_flag_callback("--no-timing", [this] { flags_["timing"] = "off"; },
                           "write 0 for wall-clock columns (byte-reproducible CSVs)");
    app->add_flag_callback("--normalize-obs", [this] { flags_["normalize_obs"] = "on"; },
                           "running mean/std observation normalization");
  }

  void add_ga(CLI::App* app) {
    add(app, "--pop", "pop", "population size");
    add(app, "--gens", "gens", "generations");
    add(app, "--mutation-rate", "mutation_rate", "flip mutation rate");
    add(app, "--mutation-mode", "mutation_mode", "per_bit | per_chromosome");
    add(app, "--pressure", "pressure", "linear ranking selection pressure in [1, 2]");
    add(app, "--elitism", "elitism", "elites carried per generation");
    app->add_option_function<std::vector<std::string>>(
        "--mask",
        [this](const std::vector<std::string>& items) {
          for (const auto& item : items) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw ConfigError("--mask expects gene=value");
            flags_["mask." + item.substr(0, eq)] = item.substr(eq + 1);
          }
        },
        "pin a gene, e.g. alpha_actor=0.001");
  }

  // Config file first, flags override.
  tuner::Settings merged() const {
    tuner::Settings s;
    if (!config_path_.empty()) s = tuner::load_settings_file(config_path_);
    for (const auto& [k, v] : flags_) s[k] = v;
    return s;
  }

 private:
  std::map<std::string, std::string> flags_;
  std::string config_path_;
};

inline tuner::CampaignConfig build_config(const SettingFlags& flags, const std::string& subcommand) {
  tuner::CampaignConfig config;
  tuner::apply_settings(flags.merged(), config);
  if (config.out_dir.empty()) config.out_dir = output_root() / subcommand;
  return config;
}

inline agent::TrainOptions train_options(const tuner::CampaignConfig& config) {
  agent::TrainOptions o;
  o.network = config.network;
  o.record_wall_time = config.record_wall_time;
  return o;
}

inline int cmd_tune(const tuner::CampaignConfig& config, std::ostream& out) {
  const tuner::CampaignResult r = tuner::run_campaign(config);
  out << "best fitness=" << csv::num(*r.best.fitness) << " epochs=" << r.best_epochs
      << " chromosome=" << r.best.chromosome.to_hex() << '\n'
      << "best " << describe(r.best_hp) << '\n'
      << "evaluations=" << r.log.size() << " artifacts=" << config.out_dir.string() << '\n';
  return kExitOk;
}

inline int cmd_train(const tuner::CampaignConfig& config, const Hyperparameters& hp,
                     std::ostream& out) {
  config.validate();
  const auto env = tuner::make_campaign_env(config);
  const agent::TrainingTrace trace =
      agent::train_until(*env, hp, config.schedule, config.seed, train_options(config));
  tuner::ensure_writable_dir(config.out_dir);
  tuner::write_trace_file(config.out_dir / "trace.csv", trace);
  const std::int64_t steps = trace.records.empty() ? 0 : trace.records.back().steps_cum;
  out << "outcome=" << (trace.failed ? "failed" : trace.reached() ? "reached" : "exhausted")
      << " epochs=" << (trace.reached() ? trace.epochs_to_success : trace.epochs_completed())
      << " steps=" << steps << " wall_s=" << csv::fixed(trace.wall_s(), 3) << '\n';
  if (trace.failed) out << "failure: " << trace.failure << '\n';
  return kExitOk;
}

inline int cmd_compare(const tuner::CampaignConfig& config,
                       const std::vector<NamedHyperparameters>& configs,
                       const std::vector<std::uint64_t>& seeds, std::ostream& out) {
  config.validate();
  tuner::ComparisonOptions o;
  o.workers = config.workers;
  o.network = config.network;
  o.record_wall_time = config.record_wall_time;
  o.mode = config.mode;
  const auto report = tuner::run_comparison(configs, config.env_name, config.schedule, seeds, o);
  tuner::write_comparison_artifacts(config.out_dir, report);
  tuner::write_comparison_csv(out, report);
  return kExitOk;
}

inline int cmd_gradcheck(std::uint64_t seed, int cases, double fault, std::ostream& out) {
  gradcheck::GradcheckOptions o;
  o.cases = cases;
  o.injected_fault = fault;
  const auto report = gradcheck::run_gradcheck(seed, o);
  for (const auto& c : report.cases) {
    if (!c.passed) {
      out << "FAIL " << c.name << " max_rel_err=" << c.stats.max_relative_error
          << " checked=" << c.stats.checked << '\n';
    }
  }
  out << (report.passed ? "PASS" : "FAIL") << " cases=" << report.cases.size()
      << " coordinates=" << report.total.checked << " kink_skips=" << report.total.skipped
      << " max_rel_err=" << report.total.max_relative_error
      << " tolerance=" << gradcheck::kRelativeTolerance << '\n';
  return report.passed ? kExitOk : kExitFailure;
}

struct GaSanityResult {
  bool monotone_checked = true;
  bool monotone = true;
  double max_gene_deviation = 1.0;
  bool passed = false;
};

inline constexpr double kGaSanityGeneTolerance = 0.01;

// GA on the synthetic objective 1/(1 + sum|hp_i - 0.5|); writes the
// best-per-generation series to ga_sanity.csv.
inline GaSanityResult run_ga_sanity(const ga::GaConfig& config, const fs::path& out_dir) {
  const auto fitness = [](const ga::Chromosome& c) {
    return ga::Evaluation{ga::synthetic_fitness(ga::decode(c))};
  };
  const auto evolved = ga::evolve(fitness, config);
  GaSanityResult r;
  r.monotone_checked = config.elitism_count >= 1;
  for (std::size_t g = 1; g < evolved.best_per_generation.size(); ++g) {
    if (*evolved.best_per_generation[g].fitness < *evolved.best_per_generation[g - 1].fitness) {
      r.monotone = false;
    }
  }
  const Hyperparameters best = ga::decode(evolved.best.chromosome);
  r.max_gene_deviation = 0.0;
  for (int g = 0; g < kGeneCount; ++g) {
    r.max_gene_deviation = std::max(r.max_gene_deviation, std::abs(gene_value(best, g) - 0.5));
  }
  r.passed = (!r.monotone_checked || r.monotone) &&
             r.max_gene_deviation <= kGaSanityGeneTolerance + 1e-12;

  tuner::ensure_writable_dir(out_dir);
  std::ofstream csv_out(out_dir / "ga_sanity.csv", std::ios::binary);
  csv_out << "generation,best_fitness";
  for (auto name : kGeneNames) csv_out << ',' << name;
  csv_out << ",max_gene_deviation\n";
  for (std::size_t g = 0; g < evolved.best_per_generation.size(); ++g) {
    const auto& ind = evolved.best_per_generation[g];
    const Hyperparameters hp = ga::decode(ind.chromosome);
    double dev = 0.0;
    csv_out << g << ',' << csv::num(*ind.fitness);
    for (int k = 0; k < kGeneCount; ++k) {
      csv_out << ',' << csv::num(gene_value(hp, k));
      dev = std::max(dev, std::abs(gene_value(hp, k) - 0.5));
    }
    csv_out << ',' << csv::num(dev) << '\n';
  }
  return r;
}

inline int cmd_ga_sanity(const ga::GaConfig& config, const fs::path& out_dir, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const GaSanityResult r = run_ga_sanity(config, out_dir);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (r.monotone_checked) {
    out << "best-of-generation nondecreasing: " << (r.monotone ? "yes" : "NO") << '\n';
  } else {
    out << "best-of-generation monotonicity: skipped (elitism disabled)\n";
  }
  out << "max gene deviation from 0.5: " << csv::num(r.max_gene_deviation)
      << " (tolerance " << kGaSanityGeneTolerance << ")\n"
      << (r.passed ? "PASS" : "FAIL") << " runtime_s=" << csv::fixed(secs, 2) << '\n';
  return r.passed ? kExitOk : kExitFailure;
}

inline int cmd_presets(std::ostream& out) {
  out << "name,gamma,tau,alpha_actor,alpha_critic,epsilon,eta\n";
  for (const auto& p : presets()) {
    out << p.name << ',' << csv::num(p.hp.gamma) << ',' << csv::num(p.hp.tau) << ','
        << csv::num(p.hp.alpha_actor) << ',' << csv::num(p.hp.alpha_critic) << ','
        << csv::num(p.hp.epsilon) << ',' << csv::num(p.hp.eta) << '\n';
  }
  return kExitOk;
}

inline std::vector<NamedHyperparameters> resolve_presets(const std::vector<std::string>& names) {
  std::vector<NamedHyperparameters> out;
  for (const auto& item : names) {
    for (const auto& raw : csv::split(item)) {
      const std::string name = tuner::trim(raw);
      const auto hp = find_preset(name);
      if (!hp) throw ConfigError("unknown preset '" + name + "'");
      out.push_back({name, *hp});
    }
  }
  return out;
}

// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"evotune: genetic-algorithm hyperparameter tuning for DDPG+HER", "evotune"};
  app.require_subcommand(1);

  SettingFlags tune_flags, train_flags, compare_flags;
  CLI::App* tune = app.add_subcommand("tune", "run a GA tuning campaign");
  tune_flags.add_schedule(tune);
  tune_flags.add_ga(tune);

  CLI::App* train = app.add_subcommand("train", "train one configuration");
  train_flags.add_schedule(train);
  std::string preset = "baseline";
  std::string values;
  train->add_option("--preset", preset, "preset name")->capture_default_str();
  train->add_option("--values", values, "gamma,tau,alpha_actor,alpha_critic,epsilon,eta");

  CLI::App* compare = app.add_subcommand("compare", "compare presets over seeds");
  compare_flags.add_schedule(compare);
  std::vector<std::string> compare_presets;
  std::string seeds_text = "0..9";
  compare->add_option("--preset,--presets", compare_presets, "presets (repeat or comma list)");
  compare->add_option("--seeds", seeds_text, "seed list: 0..9 or 0,3,7")->capture_default_str();

  CLI::App* grad = app.add_subcommand("gradcheck", "finite-difference gradient verification");
  std::uint64_t grad_seed = 0;
  int grad_cases = 20;
  double grad_fault = 0.0;
  grad->add_option("--seed", grad_seed, "seed")->capture_default_str();
  grad->add_option("--cases", grad_cases, "random instances per check")->capture_default_str();
  grad->add_option("--inject-fault", grad_fault, "scale analytic gradients by 1+x (negative control)")
      ->group("");

  CLI::App* sanity = app.add_subcommand("ga-sanity", "GA on a synthetic objective");
  ga::GaConfig sanity_config;
  std::string sanity_out;
  std::string sanity_mode = "per_bit";
  sanity->add_option("--pop", sanity_config.population_size)->capture_default_str();
  sanity->add_option("--gens", sanity_config.generations)->capture_default_str();
  sanity->add_option("--mutation-rate", sanity_config.mutation_rate)->capture_default_str();
  sanity->add_option("--mutation-mode", sanity_mode)->capture_default_str();
  sanity->add_option("--pressure", sanity_config.selection_pressure)->capture_default_str();
  sanity->add_option("--elitism", sanity_config.elitism_count)->capture_default_str();
  sanity->add_option("--seed", sanity_config.seed)->capture_default_str();
  sanity->add_option("--out", sanity_out, "output directory");

  app.add_subcommand("presets", "print shipped hyperparameter presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (tune->parsed()) {
      tuner::CampaignConfig config;
      try {
        config = build_config(tune_flags, "tune");
        config.validate();
      } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
      }
      return cmd_tune(config, out);
    }
    if (train->parsed()) {
      tuner::CampaignConfig config;
      Hyperparameters hp;
      try {
        config = build_config(train_flags, "train");
        if (config.env_name.empty()) config.env_name = "point-reach";
        config.validate();
        if (!values.empty()) {
          hp = parse_values(values);
        } else if (auto p = find_preset(preset)) {
          hp = *p;
        } else {
          throw ConfigError("unknown preset '" + preset + "'");
        }
      } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
      }
      return cmd_train(config, hp, out);
    }
    if (compare->parsed()) {
      tuner::CampaignConfig config;
      std::vector<NamedHyperparameters> configs;
      std::vector<std::uint64_t> seeds;
      try {
        config = build_config(compare_flags, "compare");
        if (config.env_name.empty()) config.env_name = "point-reach";
        config.validate();
        configs = resolve_presets(compare_presets.empty()
                                      ? std::vector<std::string>{"baseline", "ga-all-envs"}
                                      : compare_presets);
        seeds = parse_seed_list(seeds_text);
      } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
      }
      return cmd_compare(config, configs, seeds, out);
    }
    if (grad->parsed()) {
      if (grad_cases < 1) {
        err << "error: --cases must be >= 1\n";
        return kExitUsage;
      }
      return cmd_gradcheck(grad_seed, grad_cases, grad_fault, out);
    }
    if (sanity->parsed()) {
      try {
        sanity_config.mutation_mode = ga::parse_mutation_mode(sanity_mode);
        sanity_config.validate();
      } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
      }
      return cmd_ga_sanity(sanity_config,
                           sanity_out.empty() ? output_root() / "ga-sanity" : fs::path(sanity_out),
                           out);
    }
    return cmd_presets(out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "runtime failure: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace evotune::cli

#endif  // EVOTUNE_COMMANDS_HPP_
