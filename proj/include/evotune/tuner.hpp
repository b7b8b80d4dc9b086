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

// Campaign orchestration: binds GA chromosomes to capped training runs,
// persists ledgers, resumes interrupted campaigns, and compares named
// hyperparameter sets over shared seed lists.
//
// Artifacts under the output directory:
//   ga_log.csv            one row per evaluated chromosome
//   ga_generations.csv    best individual of every generation
//   best.json             best chromosome, decoded values and fitness
//   traces/eval_<n>.csv   training trace of evaluation n
//   comparison.csv        aggregates per named configuration (compare mode)
//   curves.csv            per-epoch mean success rate per configuration
//   traces/<name>_seed<k>.csv

#ifndef EVOTUNE_TUNER_HPP_
#define EVOTUNE_TUNER_HPP_

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evotune/agent.hpp"
#include "evotune/csv.hpp"
#include "evotune/envs.hpp"
#include "evotune/errors.hpp"
#include "evotune/ga.hpp"
#include "evotune/hyperparameters.hpp"
#include "evotune/rng.hpp"

namespace evotune::tuner {

namespace fs = std::filesystem;

// Genes pinned to fixed values regardless of chromosome content.
struct GeneMask {
  std::array<std::optional<double>, kGeneCount> fixed;

  bool any() const {
    return std::any_of(fixed.begin(), fixed.end(), [](const auto& v) { return v.has_value(); });
  }

  void apply(Hyperparameters& hp) const {
    for (int g = 0; g < kGeneCount; ++g) {
      if (fixed[g]) gene_ref(hp, g) = *fixed[g];
    }
  }
};

inline constexpr double kPinnedLearningRate = 0.001;

struct CampaignConfig {
  std::string env_name;
  std::optional<envs::StartGoalMode> mode;
  ga::GaConfig ga;
  agent::TrainSchedule schedule;  // schedule.max_epochs is the per-evaluation cap
  agent::NetworkConfig network;
  int workers = 1;
  std::uint64_t seed = 0;
  fs::path out_dir;
  GeneMask mask;
  bool record_wall_time = true;

  // Mask actually applied: consecutive_perfect mode pins both learning rates
  // to 0.001 unless the user pinned them explicitly.
  GeneMask effective_mask() const {
    GeneMask m = mask;
    if (schedule.success_rule == agent::SuccessRule::kConsecutivePerfect) {
      for (Gene g : {Gene::kAlphaActor, Gene::kAlphaCritic}) {
        auto& slot = m.fixed[static_cast<int>(g)];
        if (!slot) slot = kPinnedLearningRate;
      }
    }
    return m;
  }

  void validate() const {
    if (env_name.empty()) throw ConfigError("missing environment name (env)");
    envs::make_env(env_name, mode);
    ga.validate();
    schedule.validate();
    if (workers < 1) throw ConfigError("workers must be >= 1");
    for (int g = 0; g < kGeneCount; ++g) {
      const auto& v = mask.fixed[g];
      if (v && !(*v >= 0.0 && *v <= 1.0)) {
        throw ConfigError("mask." + std::string(kGeneNames[g]) + " outside [0, 1]");
      }
    }
  }
};

using Settings = std::map<std::string, std::string>;

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Flat key=value text; '#' starts a comment.
inline Settings parse_settings(std::istream& is) {
  Settings out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

inline Settings load_settings_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  return parse_settings(in);
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

inline std::vector<int> parse_int_list(const std::string& v) {
  std::vector<int> out;
  for (const auto& cell : csv::split(v)) out.push_back(static_cast<int>(csv::parse_int(trim(cell))));
  return out;
}

// Applies recognized keys to `config`; unknown keys are rejected.
inline void apply_settings(const Settings& settings, CampaignConfig& config) {
  for (const auto& [key, value] : settings) {
    auto as_int = [&] {
      try {
        return static_cast<int>(csv::parse_int(value));
      } catch (const ConfigError&) {
        throw ConfigError(key + ": expected an integer, got '" + value + "'");
      }
    };
    auto as_double = [&] {
      try {
        return csv::parse_double(value);
      } catch (const ConfigError&) {
        throw ConfigError(key + ": expected a number, got '" + value + "'");
      }
    };
    if (key == "env") config.env_name = value;
    else if (key == "mode") config.mode = envs::parse_mode(value);
    else if (key == "pop") config.ga.population_size = as_int();
    else if (key == "gens") config.ga.generations = as_int();
    else if (key == "mutation_rate") config.ga.mutation_rate = as_double();
    else if (key == "mutation_mode") config.ga.mutation_mode = ga::parse_mutation_mode(value);
    else if (key == "pressure") config.ga.selection_pressure = as_double();
    else if (key == "elitism") config.ga.elitism_count = as_int();
    else if (key == "max_epochs") config.schedule.max_epochs = as_int();
    else if (key == "cycles") config.schedule.cycles_per_epoch = as_int();
    else if (key == "episodes") config.schedule.episodes_per_cycle = as_int();
    else if (key == "episode_length") config.schedule.episode_length = as_int();
    else if (key == "opt_steps") config.schedule.opt_steps_per_cycle = as_int();
    else if (key == "batch") config.schedule.batch_size = as_int();
    else if (key == "eval_rollouts") config.schedule.eval_rollouts = as_int();
    else if (key == "her_k") config.schedule.her_k = as_int();
    else if (key == "buffer") config.schedule.buffer_capacity = static_cast<std::size_t>(as_int());
    else if (key == "threshold") config.schedule.success_threshold = as_double();
    else if (key == "success_rule") config.schedule.success_rule = agent::parse_success_rule(value);
    else if (key == "consecutive") config.schedule.consecutive_epochs = as_int();
    else if (key == "workers") config.workers = as_int();
    else if (key == "seed") {
      const long long s = csv::parse_int(value);
      if (s < 0) throw ConfigError("seed must be >= 0");
      config.seed = static_cast<std::uint64_t>(s);
      config.ga.seed = config.seed;
    }
    else if (key == "out_dir") config.out_dir = value;
    else if (key == "timing") config.record_wall_time = parse_bool(key, value);
    else if (key == "hidden") config.network.hidden = parse_int_list(value);
    else if (key == "normalize_obs") config.network.normalize_observations = parse_bool(key, value);
    else if (key == "optimizer") {
      if (value == "adam") config.network.optimizer = agent::OptimizerKind::kAdam;
      else if (value == "sgd") config.network.optimizer = agent::OptimizerKind::kSgd;
      else throw ConfigError("optimizer: expected adam|sgd");
    } else if (key.rfind("mask.", 0) == 0) {
      const auto gene = gene_index(key.substr(5));
      if (!gene) throw ConfigError("unknown mask gene '" + key.substr(5) + "'");
      config.mask.fixed[*gene] = as_double();
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

inline std::uint64_t evaluation_seed(std::uint64_t campaign_seed, const ga::Chromosome& c) {
  const auto [hi, lo] = c.words();
  return derive_seed({campaign_seed, hi, lo});
}

struct FitnessOutcome {
  ga::Evaluation evaluation;
  Hyperparameters hp;
  agent::TrainingTrace trace;
};

inline std::string status_of(const agent::TrainingTrace& t) {
  if (t.failed) return "failed";
  return t.reached() ? "reached" : "exhausted";
}

inline double fitness_from(const std::string& status, int epochs) {
  return status == "reached" && epochs > 0 ? 1.0 / epochs : 0.0;
}

inline std::unique_ptr<envs::Env> make_campaign_env(const CampaignConfig& config) {
  return agent::make_training_env(config.env_name, config.mode, config.schedule);
}

// 1/epochs when the success rule fires within the cap, else 0.
inline FitnessOutcome fitness_of(const ga::Chromosome& chromosome, const CampaignConfig& config,
                                 const envs::Env& env) {
  FitnessOutcome out;
  out.hp = ga::decode(chromosome);
  config.effective_mask().apply(out.hp);
  agent::TrainOptions options;
  options.network = config.network;
  options.record_wall_time = config.record_wall_time;
  out.trace = agent::train_until(env, out.hp, config.schedule,
                                 evaluation_seed(config.seed, chromosome), options);
  out.evaluation.status = status_of(out.trace);
  out.evaluation.epochs =
      out.trace.reached() ? out.trace.epochs_to_success : out.trace.epochs_completed();
  out.evaluation.fitness = fitness_from(out.evaluation.status, out.evaluation.epochs);
  out.evaluation.wall_s = out.trace.wall_s();
  return out;
}

inline FitnessOutcome fitness_of(const ga::Chromosome& chromosome, const CampaignConfig& config) {
  return fitness_of(chromosome, config, *make_campaign_env(config));
}

inline constexpr const char* kGaLogHeader =
    "generation,eval_index,chromosome_hex,fitness,epochs,wall_s,status";

inline std::string ga_log_row(const ga::GaLogRecord& r) {
  return std::to_string(r.generation) + ',' + std::to_string(r.eval_index) + ',' +
         r.chromosome.to_hex() + ',' + csv::num(r.result.fitness) + ',' +
         std::to_string(r.result.epochs) + ',' + csv::fixed(r.result.wall_s, 3) + ',' +
         r.result.status;
}

inline std::vector<ga::GaLogRecord> read_ga_log(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || csv::split(line) != csv::split(kGaLogHeader)) {
    throw ConfigError("ga_log.csv: unexpected header");
  }
  std::vector<ga::GaLogRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto c = csv::split(line);
    if (c.size() != 7) continue;  // torn final line of an interrupted run
    ga::GaLogRecord r;
    r.generation = static_cast<int>(csv::parse_int(c[0]));
    r.eval_index = static_cast<int>(csv::parse_int(c[1]));
    r.chromosome = ga::Chromosome::from_hex(c[2]);
    r.result.epochs = static_cast<int>(csv::parse_int(c[4]));
    r.result.wall_s = csv::parse_double(c[5]);
    r.result.status = c[6];
    // Recomputed rather than parsed so resumed fitness values are bit-identical.
    r.result.fitness = r.result.status == "ok" ? csv::parse_double(c[3])
                                               : fitness_from(r.result.status, r.result.epochs);
    out.push_back(std::move(r));
  }
  return out;
}

inline std::string hp_json_key(int gene) { return std::string(kGeneNames[gene]); }

inline nlohmann::json hp_to_json(const Hyperparameters& hp) {
  nlohmann::json j;
  for (int g = 0; g < kGeneCount; ++g) j[hp_json_key(g)] = gene_value(hp, g);
  return j;
}

struct CampaignResult {
  Hyperparameters best_hp;
  ga::Individual best;
  int best_epochs = 0;
  std::vector<ga::GaLogRecord> log;
  std::vector<ga::Individual> best_per_generation;
  int fitness_calls = 0;
};

inline void ensure_writable_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path probe = dir / ".write_probe";
  std::ofstream out(probe);
  if (ec || !out) throw ConfigError("output directory not writable: " + dir.string());
  out.close();
  fs::remove(probe, ec);
}

inline void write_trace_file(const fs::path& path, const agent::TrainingTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  agent::write_trace_csv(out, trace);
}

// Runs the GA with capped training runs as the fitness function. Results in
// an existing ga_log.csv are replayed instead of retrained, so an interrupted
// campaign restarted with the same config resumes where it stopped.
inline CampaignResult run_campaign(const CampaignConfig& input,
                                   const ga::FitnessFn* fitness_override = nullptr) {
  CampaignConfig config = input;
  config.ga.seed = config.seed;
  config.validate();
  if (config.out_dir.empty()) throw ConfigError("missing output directory (out_dir)");
  ensure_writable_dir(config.out_dir);
  ensure_writable_dir(config.out_dir / "traces");

  const fs::path log_path = config.out_dir / "ga_log.csv";
  ga::FitnessCache persisted;
  if (fs::exists(log_path)) {
    std::ifstream in(log_path);
    for (const auto& r : read_ga_log(in)) persisted.insert(r.chromosome, r.result);
  }

  std::ofstream log_out(log_path, std::ios::binary | std::ios::trunc);
  if (!log_out) throw ConfigError("cannot write " + log_path.string());
  log_out << kGaLogHeader << '\n' << std::flush;

  const auto env = make_campaign_env(config);
  std::mutex traces_mu;
  std::map<ga::Chromosome, agent::TrainingTrace> pending_traces;

  const ga::FitnessFn train = [&](const ga::Chromosome& c) -> ga::Evaluation {
    FitnessOutcome o = fitness_of(c, config, *env);
    std::lock_guard lock(traces_mu);
    pending_traces[c] = std::move(o.trace);
    return o.evaluation;
  };
  const ga::FitnessFn& base = fitness_override ? *fitness_override : train;
  // A crashed evaluation is retried once, then scored zero.
  const ga::FitnessFn evaluate = [&](const ga::Chromosome& c) -> ga::Evaluation {
    for (int attempt = 0; attempt < 2; ++attempt) {
      try {
        return base(c);
      } catch (const std::exception&) {
      }
    }
    return ga::Evaluation{0.0, 0, 0.0, "crashed"};
  };

  ga::EvolveOptions options;
  options.workers = config.workers;
  options.persisted = &persisted;
  options.on_record = [&](const ga::GaLogRecord& r) {
    log_out << ga_log_row(r) << '\n' << std::flush;
    std::lock_guard lock(traces_mu);
    if (auto it = pending_traces.find(r.chromosome); it != pending_traces.end()) {
      write_trace_file(config.out_dir / "traces" / ("eval_" + std::to_string(r.eval_index) + ".csv"),
                       it->second);
      pending_traces.erase(it);
    }
  };

  const ga::EvolveResult evolved = ga::evolve(evaluate, config.ga, options);

  CampaignResult result;
  result.best = evolved.best;
  result.best_hp = ga::decode(evolved.best.chromosome);
  config.effective_mask().apply(result.best_hp);
  result.log = evolved.log;
  result.best_per_generation = evolved.best_per_generation;
  result.fitness_calls = evolved.fitness_calls;
  for (const auto& r : evolved.log) {
    if (r.chromosome == evolved.best.chromosome) result.best_epochs = r.result.epochs;
  }

  {
    std::ofstream gens(config.out_dir / "ga_generations.csv", std::ios::binary);
    gens << "generation,best_fitness,chromosome_hex\n";
    for (std::size_t g = 0; g < evolved.best_per_generation.size(); ++g) {
      const auto& ind = evolved.best_per_generation[g];
      gens << g << ',' << csv::num(*ind.fitness) << ',' << ind.chromosome.to_hex() << '\n';
    }
  }
  {
    nlohmann::json j;
    j["chromosome_hex"] = evolved.best.chromosome.to_hex();
    j["chromosome_bits"] = evolved.best.chromosome.to_string();
    j["fitness"] = *evolved.best.fitness;
    j["epochs"] = result.best_epochs;
    j["hyperparameters"] = hp_to_json(result.best_hp);
    j["env"] = config.env_name;
    j["seed"] = config.seed;
    j["population"] = config.ga.population_size;
    j["generations"] = config.ga.generations;
    std::ofstream out(config.out_dir / "best.json", std::ios::binary);
    out << j.dump(2) << '\n';
  }
  return result;
}

struct ConfigSummary {
  std::string name;
  Hyperparameters hp;
  std::vector<std::uint64_t> seeds;
  std::vector<agent::TrainingTrace> traces;
  int reached = 0;
  double mean_epochs = 0.0;
  double median_epochs = 0.0;
  double mean_episodes = 0.0;
  double mean_steps = 0.0;
  double mean_wall_s = 0.0;
};

struct ComparisonReport {
  std::string env_name;
  std::vector<ConfigSummary> configs;
};

// Epochs charged to a run: epochs-to-success when reached, otherwise the cap.
inline int charged_epochs(const agent::TrainingTrace& t, const agent::TrainSchedule& s) {
  return t.reached() ? t.epochs_to_success : s.max_epochs;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline ConfigSummary summarize(std::string name, const Hyperparameters& hp,
                               std::vector<std::uint64_t> seeds,
                               std::vector<agent::TrainingTrace> traces,
                               const agent::TrainSchedule& schedule, int episode_length) {
  ConfigSummary s{std::move(name), hp, std::move(seeds), std::move(traces)};
  std::vector<double> epochs;
  double wall = 0.0;
  for (const auto& t : s.traces) {
    epochs.push_back(charged_epochs(t, schedule));
    s.reached += t.reached() ? 1 : 0;
    wall += t.wall_s();
  }
  const double n = static_cast<double>(std::max<std::size_t>(s.traces.size(), 1));
  const double per_epoch_episodes =
      static_cast<double>(schedule.cycles_per_epoch) * schedule.episodes_per_cycle;
  s.mean_epochs = std::accumulate(epochs.begin(), epochs.end(), 0.0) / n;
  s.median_epochs = median(epochs);
  s.mean_episodes = s.mean_epochs * per_epoch_episodes;
  s.mean_steps = s.mean_episodes * episode_length;
  s.mean_wall_s = wall / n;
  return s;
}

struct ComparisonOptions {
  int workers = 1;
  agent::NetworkConfig network;
  bool record_wall_time = true;
  std::optional<envs::StartGoalMode> mode;
};

inline std::string trace_file_name(const std::string& config_name, std::uint64_t seed) {
  return config_name + "_seed" + std::to_string(seed) + ".csv";
}

// Trains every named configuration on every seed and aggregates.
inline ComparisonReport run_comparison(const std::vector<NamedHyperparameters>& configs,
                                       const std::string& env_name,
                                       const agent::TrainSchedule& schedule,
                                       const std::vector<std::uint64_t>& seeds,
                                       const ComparisonOptions& options = {}) {
  if (configs.empty()) throw ConfigError("compare: at least one configuration required");
  if (seeds.empty()) throw ConfigError("compare: at least one seed required");
  schedule.validate();
  for (const auto& c : configs) c.hp.validate();
  const auto env = agent::make_training_env(env_name, options.mode, schedule);

  const std::size_t jobs = configs.size() * seeds.size();
  std::vector<agent::TrainingTrace> traces(jobs);
  const auto errors = ga::detail::parallel_for(jobs, options.workers, [&](std::size_t j) {
    agent::TrainOptions o;
    o.network = options.network;
    o.record_wall_time = options.record_wall_time;
    traces[j] = agent::train_until(*env, configs[j / seeds.size()].hp, schedule,
                                   seeds[j % seeds.size()], o);
  });
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ComparisonReport report{env_name, {}};
  for (std::size_t c = 0; c < configs.size(); ++c) {
    std::vector<agent::TrainingTrace> mine(traces.begin() + static_cast<std::ptrdiff_t>(c * seeds.size()),
                                           traces.begin() + static_cast<std::ptrdiff_t>((c + 1) * seeds.size()));
    report.configs.push_back(summarize(configs[c].name, configs[c].hp, seeds, std::move(mine),
                                       schedule, env->spec().episode_length));
  }
  return report;
}

inline constexpr const char* kComparisonHeader =
    "name,gamma,tau,alpha_actor,alpha_critic,epsilon,eta,runs,reached,mean_epochs,"
    "median_epochs,mean_episodes,mean_steps,mean_wall_s";

inline void write_comparison_csv(std::ostream& os, const ComparisonReport& report) {
  os << kComparisonHeader << '\n';
  for (const auto& c : report.configs) {
    os << c.name << ',' << csv::num(c.hp.gamma) << ',' << csv::num(c.hp.tau) << ','
       << csv::num(c.hp.alpha_actor) << ',' << csv::num(c.hp.alpha_critic) << ','
       << csv::num(c.hp.epsilon) << ',' << csv::num(c.hp.eta) << ',' << c.traces.size() << ','
       << c.reached << ',' << csv::num(c.mean_epochs) << ',' << csv::num(c.median_epochs) << ','
       << csv::num(c.mean_episodes) << ',' << csv::num(c.mean_steps) << ','
       << csv::fixed(c.mean_wall_s, 3) << '\n';
  }
}

// Mean success rate per epoch and configuration. A run that stopped early
// contributes its last recorded rate to later epochs.
inline void write_curves_csv(std::ostream& os, const ComparisonReport& report) {
  std::size_t epochs = 0;
  for (const auto& c : report.configs) {
    for (const auto& t : c.traces) epochs = std::max(epochs, t.records.size());
  }
  os << "epoch";
  for (const auto& c : report.configs) os << ',' << c.name << "_mean_success";
  os << '\n';
  for (std::size_t e = 0; e < epochs; ++e) {
    os << e + 1;
    for (const auto& c : report.configs) {
      double sum = 0.0;
      for (const auto& t : c.traces) {
        if (t.records.empty()) continue;
        sum += t.records[std::min(e, t.records.size() - 1)].success_rate;
      }
      os << ',' << csv::num(c.traces.empty() ? 0.0 : sum / static_cast<double>(c.traces.size()));
    }
    os << '\n';
  }
}

inline void write_comparison_artifacts(const fs::path& dir, const ComparisonReport& report) {
  ensure_writable_dir(dir);
  ensure_writable_dir(dir / "traces");
  {
    std::ofstream out(dir / "comparison.csv", std::ios::binary);
    write_comparison_csv(out, report);
  }
  {
    std::ofstream out(dir / "curves.csv", std::ios::binary);
    write_curves_csv(out, report);
  }
  for (const auto& c : report.configs) {
    for (std::size_t i = 0; i < c.traces.size(); ++i) {
      write_trace_file(dir / "traces" / trace_file_name(c.name, c.seeds[i]), c.traces[i]);
    }
  }
}

// Rebuilds a report from persisted per-seed traces by re-applying the success rule.
inline ComparisonReport load_comparison(const fs::path& dir,
                                        const std::vector<NamedHyperparameters>& configs,
                                        const std::string& env_name,
                                        const agent::TrainSchedule& schedule,
                                        const std::vector<std::uint64_t>& seeds,
                                        std::optional<envs::StartGoalMode> mode = std::nullopt) {
  const int horizon = agent::make_training_env(env_name, mode, schedule)->spec().episode_length;
  ComparisonReport report{env_name, {}};
  for (const auto& c : configs) {
    std::vector<agent::TrainingTrace> traces;
    for (std::uint64_t s : seeds) {
      std::ifstream in(dir / "traces" / trace_file_name(c.name, s));
      if (!in) throw ConfigError("missing trace for " + c.name + " seed " + std::to_string(s));
      traces.push_back(agent::replay_rule(agent::read_trace_csv(in), schedule));
    }
    report.configs.push_back(summarize(c.name, c.hp, seeds, std::move(traces), schedule, horizon));
  }
  return report;
}

}  // namespace evotune::tuner

#endif  // EVOTUNE_TUNER_HPP_
