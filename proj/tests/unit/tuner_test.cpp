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

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "evotune/errors.hpp"
#include "evotune/ga.hpp"
#include "evotune/hyperparameters.hpp"
#include "evotune/tuner.hpp"

namespace evotune::tuner {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("evotune_tuner_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

agent::TrainSchedule tiny_schedule() {
  agent::TrainSchedule s;
  s.max_epochs = 2;
  s.cycles_per_epoch = 1;
  s.episodes_per_cycle = 2;
  s.opt_steps_per_cycle = 4;
  s.batch_size = 16;
  s.eval_rollouts = 4;
  s.episode_length = 10;
  return s;
}

CampaignConfig tiny_campaign(const fs::path& out) {
  CampaignConfig c;
  c.env_name = "point-reach";
  c.ga.population_size = 4;
  c.ga.generations = 2;
  c.schedule = tiny_schedule();
  c.network.hidden = {16, 16};
  c.out_dir = out;
  c.record_wall_time = false;
  return c;
}

const ga::FitnessFn kSynthetic = [](const ga::Chromosome& c) {
  return ga::Evaluation{ga::synthetic_fitness(ga::decode(c))};
};

TEST(Fitness, FromOutcome) {
  EXPECT_EQ(fitness_from("reached", 10), 0.1);
  EXPECT_EQ(fitness_from("reached", 1), 1.0);
  EXPECT_EQ(fitness_from("exhausted", 30), 0.0);
  EXPECT_EQ(fitness_from("failed", 3), 0.0);
  EXPECT_EQ(fitness_from("crashed", 0), 0.0);
}

TEST(Fitness, SeedDependsOnCampaignSeedAndBits) {
  Rng rng(1);
  const auto a = ga::Chromosome::random(rng);
  const auto b = ga::Chromosome::random(rng);
  EXPECT_EQ(evaluation_seed(0, a), evaluation_seed(0, a));
  EXPECT_NE(evaluation_seed(0, a), evaluation_seed(1, a));
  EXPECT_NE(evaluation_seed(0, a), evaluation_seed(0, b));
}

TEST(Fitness, DeterministicAndMasked) {
  CampaignConfig c = tiny_campaign({});
  c.mask.fixed[static_cast<int>(Gene::kAlphaActor)] = 0.001;
  c.mask.fixed[static_cast<int>(Gene::kEpsilon)] = 0.3;
  Rng rng(2);
  for (int i = 0; i < 3; ++i) {
    const auto chrom = ga::Chromosome::random(rng);
    const auto x = fitness_of(chrom, c);
    const auto y = fitness_of(chrom, c);
    EXPECT_EQ(x.evaluation.fitness, y.evaluation.fitness);
    EXPECT_EQ(x.trace, y.trace);
    EXPECT_EQ(x.hp.alpha_actor, 0.001);
    EXPECT_EQ(x.hp.epsilon, 0.3);
    EXPECT_EQ(x.hp.gamma, ga::decode(chrom).gamma);
    EXPECT_GE(x.evaluation.fitness, 0.0);
    EXPECT_LE(x.evaluation.fitness, 1.0);
  }
}

TEST(Fitness, ConsecutivePerfectPinsLearningRates) {
  CampaignConfig c = tiny_campaign({});
  c.env_name = "arm-reach";
  c.schedule.success_rule = agent::SuccessRule::kConsecutivePerfect;
  const GeneMask m = c.effective_mask();
  Hyperparameters hp = ga::decode(std::string(66, '1'));
  m.apply(hp);
  EXPECT_EQ(hp.alpha_actor, kPinnedLearningRate);
  EXPECT_EQ(hp.alpha_critic, kPinnedLearningRate);
  EXPECT_EQ(hp.gamma, 1.0);
}

TEST(Fitness, EpisodesCumIsEpochsTimesCyclesTimesM) {
  const CampaignConfig c = tiny_campaign({});
  Rng rng(3);
  const auto o = fitness_of(ga::Chromosome::random(rng), c);
  for (const auto& r : o.trace.records) {
    EXPECT_EQ(r.episodes_cum, static_cast<std::int64_t>(r.epoch) * 1 * 2);
    EXPECT_EQ(r.steps_cum, r.episodes_cum * 10);
  }
}

TEST(Settings, ParseAndApply) {
  std::istringstream in(
      "# campaign\nenv = arm-reach\npop=12\n\ngens=3  \nmask.alpha_actor=0.001\n"
      "success_rule=consecutive_perfect\nseed=9\nhidden=32,32\ntiming=off\n");
  CampaignConfig c;
  apply_settings(parse_settings(in), c);
  EXPECT_EQ(c.env_name, "arm-reach");
  EXPECT_EQ(c.ga.population_size, 12);
  EXPECT_EQ(c.ga.generations, 3);
  EXPECT_EQ(c.mask.fixed[static_cast<int>(Gene::kAlphaActor)], 0.001);
  EXPECT_EQ(c.schedule.success_rule, agent::SuccessRule::kConsecutivePerfect);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.ga.seed, 9u);
  EXPECT_EQ(c.network.hidden, (std::vector<int>{32, 32}));
  EXPECT_FALSE(c.record_wall_time);
}

TEST(Settings, Rejections) {
  CampaignConfig c;
  EXPECT_THROW(apply_settings({{"colour", "blue"}}, c), ConfigError);
  EXPECT_THROW(apply_settings({{"pop", "many"}}, c), ConfigError);
  EXPECT_THROW(apply_settings({{"mask.learning", "0.1"}}, c), ConfigError);
  std::istringstream bad("no equals sign here\n");
  EXPECT_THROW(parse_settings(bad), ConfigError);
  c = {};
  EXPECT_THROW(c.validate(), ConfigError);  // missing env
  c.env_name = "point-reach";
  c.schedule.max_epochs = 0;
  EXPECT_THROW(c.validate(), std::exception);
}

TEST(Campaign, TinySyntheticCampaignWritesArtifacts) {
  const fs::path out = scratch_dir("tiny");
  CampaignConfig c = tiny_campaign(out);
  c.ga.population_size = 2;
  c.ga.generations = 1;
  const auto r = run_campaign(c, &kSynthetic);
  EXPECT_LE(r.log.size(), 2u);
  EXPECT_LE(r.fitness_calls, 2);
  for (const char* f : {"ga_log.csv", "best.json", "ga_generations.csv"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  const auto j = nlohmann::json::parse(slurp(out / "best.json"));
  EXPECT_EQ(j["chromosome_hex"], r.best.chromosome.to_hex());
  EXPECT_EQ(j["fitness"].get<double>(), *r.best.fitness);
  std::ifstream log(out / "ga_log.csv");
  EXPECT_EQ(read_ga_log(log).size(), r.log.size());
}

TEST(Campaign, TrainingCampaignWritesTraces) {
  const fs::path out = scratch_dir("traces");
  const auto r = run_campaign(tiny_campaign(out));
  for (const auto& rec : r.log) {
    const fs::path p = out / "traces" / ("eval_" + std::to_string(rec.eval_index) + ".csv");
    ASSERT_TRUE(fs::exists(p));
    std::ifstream in(p);
    const auto records = agent::read_trace_csv(in);
    EXPECT_FALSE(records.empty());
    EXPECT_TRUE(rec.result.status == "reached" || rec.result.status == "exhausted");
  }
}

TEST(Campaign, ResumeDoesNotReevaluate) {
  const fs::path out = scratch_dir("resume");
  CampaignConfig c = tiny_campaign(out);
  c.ga.population_size = 8;
  c.ga.generations = 4;
  const auto full = run_campaign(c, &kSynthetic);
  const std::string full_log = slurp(out / "ga_log.csv");

  // Simulate an interruption: keep the header plus 10 rows and a torn line.
  std::istringstream lines(full_log);
  std::string line, kept;
  for (int i = 0; i < 11 && std::getline(lines, line); ++i) kept += line + '\n';
  std::getline(lines, line);
  kept += line.substr(0, line.size() / 2);
  {
    std::ofstream o(out / "ga_log.csv", std::ios::binary | std::ios::trunc);
    o << kept;
  }

  std::atomic<int> calls{0};
  const ga::FitnessFn counting = [&](const ga::Chromosome& ch) {
    ++calls;
    return kSynthetic(ch);
  };
  const auto resumed = run_campaign(c, &counting);
  EXPECT_EQ(calls.load(), full.fitness_calls - 10);
  EXPECT_EQ(slurp(out / "ga_log.csv"), full_log);
  EXPECT_EQ(resumed.best.chromosome, full.best.chromosome);
}

TEST(Campaign, CrashedEvaluationRetriedThenZero) {
  const fs::path out = scratch_dir("crash");
  CampaignConfig c = tiny_campaign(out);
  c.ga.population_size = 4;
  c.ga.generations = 1;
  std::atomic<int> calls{0};
  const ga::FitnessFn always = [&](const ga::Chromosome&) -> ga::Evaluation {
    ++calls;
    throw std::runtime_error("worker died");
  };
  const auto r = run_campaign(c, &always);
  EXPECT_EQ(calls.load(), 2 * static_cast<int>(r.log.size()));
  for (const auto& rec : r.log) {
    EXPECT_EQ(rec.result.fitness, 0.0);
    EXPECT_EQ(rec.result.status, "crashed");
  }

  std::atomic<int> flaky_calls{0};
  const ga::FitnessFn once = [&](const ga::Chromosome& ch) -> ga::Evaluation {
    if (flaky_calls++ == 0) throw std::runtime_error("transient");
    return kSynthetic(ch);
  };
  const auto r2 = run_campaign(tiny_campaign(scratch_dir("crash2")), &once);
  for (const auto& rec : r2.log) EXPECT_GT(rec.result.fitness, 0.0);
}

TEST(Campaign, UnwritableOutputIsConfigError) {
  const fs::path blocker = scratch_dir("blocker");
  { std::ofstream(blocker) << "file"; }
  EXPECT_THROW(run_campaign(tiny_campaign(blocker / "sub"), &kSynthetic), ConfigError);
  fs::remove(blocker);
}

TEST(Campaign, WorkerCountDoesNotChangeLedger) {
  const fs::path a = scratch_dir("w1"), b = scratch_dir("w4");
  CampaignConfig c1 = tiny_campaign(a);
  CampaignConfig c4 = tiny_campaign(b);
  c4.workers = 4;
  run_campaign(c1);
  run_campaign(c4);
  EXPECT_EQ(slurp(a / "ga_log.csv"), slurp(b / "ga_log.csv"));
  EXPECT_EQ(slurp(a / "best.json").size(), slurp(b / "best.json").size());
}

TEST(Comparison, SingleConfigSingleSeedReducesToRun) {
  const auto baseline = *find_preset("baseline");
  const auto s = tiny_schedule();
  ComparisonOptions o;
  o.record_wall_time = false;
  const auto report = run_comparison({{"baseline", baseline}}, "point-reach", s, {3}, o);
  agent::TrainOptions t;
  t.record_wall_time = false;
  const auto env = agent::make_training_env("point-reach", std::nullopt, s);
  const auto trace = agent::train_until(*env, baseline, s, 3, t);
  ASSERT_EQ(report.configs.size(), 1u);
  const auto& c = report.configs[0];
  EXPECT_EQ(c.traces[0], trace);
  EXPECT_EQ(c.mean_epochs, charged_epochs(trace, s));
  EXPECT_EQ(c.median_epochs, c.mean_epochs);
  EXPECT_EQ(c.mean_episodes, c.mean_epochs * 1 * 2);
  EXPECT_EQ(c.mean_steps, c.mean_episodes * 10);
}

TEST(Comparison, IdenticalConfigsIdenticalAggregatesAndReload) {
  const fs::path out = scratch_dir("compare");
  const auto baseline = *find_preset("baseline");
  const auto s = tiny_schedule();
  ComparisonOptions o;
  o.workers = 2;
  o.record_wall_time = false;
  const std::vector<NamedHyperparameters> configs = {{"a", baseline}, {"b", baseline}};
  const auto report = run_comparison(configs, "point-reach", s, {0, 1, 2}, o);
  const auto& a = report.configs[0];
  const auto& b = report.configs[1];
  EXPECT_EQ(a.traces, b.traces);
  EXPECT_EQ(a.mean_epochs, b.mean_epochs);
  EXPECT_EQ(a.mean_steps, b.mean_steps);
  EXPECT_EQ(a.seeds, b.seeds);

  write_comparison_artifacts(out, report);
  const auto reloaded = load_comparison(out, configs, "point-reach", s, {0, 1, 2});
  std::ostringstream x, y;
  write_comparison_csv(x, report);
  write_comparison_csv(y, reloaded);
  EXPECT_EQ(x.str(), y.str());

  std::istringstream curves(slurp(out / "curves.csv"));
  std::string header;
  std::getline(curves, header);
  EXPECT_EQ(header, "epoch,a_mean_success,b_mean_success");
  std::istringstream rows(slurp(out / "comparison.csv"));
  int n = 0;
  for (std::string line; std::getline(rows, line);) ++n;
  EXPECT_EQ(n, 3);
}

TEST(Comparison, RequiresConfigsAndSeeds) {
  const auto s = tiny_schedule();
  EXPECT_THROW(run_comparison({}, "point-reach", s, {0}), ConfigError);
  EXPECT_THROW(run_comparison({{"b", *find_preset("baseline")}}, "point-reach", s, {}), ConfigError);
}

TEST(Comparison, Median) {
  EXPECT_EQ(median({3, 1, 2}), 2.0);
  EXPECT_EQ(median({4, 1, 2, 3}), 2.5);
}

}  // namespace
}  // namespace evotune::tuner
