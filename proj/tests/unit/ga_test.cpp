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
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "evotune/errors.hpp"
#include "evotune/ga.hpp"
#include "evotune/hyperparameters.hpp"

namespace evotune::ga {
namespace {

std::string zeros(int n) { return std::string(static_cast<std::size_t>(n), '0'); }

TEST(Decode, AllZero) {
  const Hyperparameters hp = decode(zeros(kChromosomeBits));
  for (int g = 0; g < kGeneCount; ++g) EXPECT_EQ(gene_value(hp, g), 0.0);
}

TEST(Decode, TauSlot) {
  // 00111100100 = 256 + 128 + 64 + 32 + 4 = 484.
  const Hyperparameters hp = decode("00111100100" + zeros(55));
  EXPECT_EQ(hp.tau, 0.484);
  EXPECT_EQ(hp.gamma, 0.0);
}

TEST(Decode, GeneOrder) {
  Chromosome c;
  for (int g = 0; g < kGeneCount; ++g) c.set_gene_code(g, 100 * (g + 1));
  const Hyperparameters hp = decode(c);
  EXPECT_EQ(hp.tau, 0.1);
  EXPECT_EQ(hp.gamma, 0.2);
  EXPECT_EQ(hp.alpha_critic, 0.3);
  EXPECT_EQ(hp.alpha_actor, 0.4);
  EXPECT_EQ(hp.epsilon, 0.5);
  EXPECT_EQ(hp.eta, 0.6);
  EXPECT_EQ(c.to_string().substr(11, 11), "00011001000");  // 200, MSB first
}

TEST(Decode, ClampsSurplusCodes) {
  EXPECT_EQ(decode_gene(2047), 1.0);
  EXPECT_EQ(decode_gene(1001), 1.0);
  EXPECT_EQ(decode(std::string(66, '1')).eta, 1.0);
}

TEST(Decode, WrongLengthIsShapeError) {
  EXPECT_THROW(decode(zeros(65)), ShapeError);
  EXPECT_THROW(decode(zeros(65) + "2"), ShapeError);
}

TEST(Encode, ZerosAndDomain) {
  EXPECT_EQ(encode(Hyperparameters{0, 0, 0, 0, 0, 0}).to_string(), zeros(66));
  Hyperparameters hp{0, 0, 0, 0, 0, 0};
  hp.eta = 1.2;
  EXPECT_THROW(encode(hp), DomainError);
  hp.eta = 0.1234;
  EXPECT_THROW(encode(hp), DomainError);
}

TEST(Encode, ExhaustivePerGeneRoundTrip) {
  for (int g = 0; g < kGeneCount; ++g) {
    for (int v = 0; v <= 1000; ++v) {
      Hyperparameters hp{0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
      gene_ref(hp, g) = v / 1000.0;
      ASSERT_EQ(decode(encode(hp)), hp) << "gene " << g << " value " << v;
    }
  }
}

TEST(Encode, RandomVectorsRoundTrip) {
  Rng rng(1);
  std::uniform_int_distribution<int> code(0, 1000);
  for (int i = 0; i < 10000; ++i) {
    Hyperparameters hp;
    for (int g = 0; g < kGeneCount; ++g) gene_ref(hp, g) = code(rng) / 1000.0;
    ASSERT_EQ(decode(encode(hp)), hp);
  }
}

TEST(Encode, PresetsRoundTrip) {
  for (const auto& p : presets()) EXPECT_EQ(decode(encode(p.hp)), p.hp) << p.name;
}

TEST(Chromosome, HexRoundTrip) {
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const Chromosome c = Chromosome::random(rng);
    const std::string hex = c.to_hex();
    EXPECT_EQ(hex.size(), static_cast<std::size_t>(kHexChars));
    EXPECT_EQ(Chromosome::from_hex(hex), c);
    EXPECT_EQ(Chromosome::from_string(c.to_string()), c);
  }
}

TEST(RankSelect, Probabilities) {
  const auto p = rank_probabilities(3, 1.8);
  EXPECT_NEAR(p[0], 0.2 / 3, 1e-12);
  EXPECT_NEAR(p[1], 1.0 / 3, 1e-12);
  EXPECT_NEAR(p[2], 0.6, 1e-12);
  for (double q : rank_probabilities(7, 1.0)) EXPECT_NEAR(q, 1.0 / 7, 1e-15);
  for (std::size_t n : {2u, 5u, 30u}) {
    for (double s : {1.0, 1.3, 1.8, 2.0}) {
      const auto ps = rank_probabilities(n, s);
      EXPECT_NEAR(std::accumulate(ps.begin(), ps.end(), 0.0), 1.0, 1e-12);
      for (std::size_t i = 1; i < n; ++i) EXPECT_GE(ps[i], ps[i - 1]);
    }
  }
  EXPECT_THROW(rank_probabilities(3, 2.5), DomainError);
}

TEST(RankSelect, MonteCarloFrequencies) {
  std::vector<Individual> pop(3);
  Rng init(3);
  for (int i = 0; i < 3; ++i) pop[i] = {Chromosome::random(init), 0.1 * (3 - i)};
  sort_population(pop);
  Rng rng(4);
  std::vector<int> counts(3, 0);
  const int n = 100000;
  for (int t = 0; t < n; ++t) {
    const Individual& s = rank_select(pop, 1.8, rng);
    for (int i = 0; i < 3; ++i) counts[i] += s.chromosome == pop[i].chromosome;
  }
  EXPECT_NEAR(counts[0] / double(n), 0.0667, 0.01);
  EXPECT_NEAR(counts[1] / double(n), 0.3333, 0.01);
  EXPECT_NEAR(counts[2] / double(n), 0.6, 0.01);
}

TEST(RankSelect, TiesOrderedByBits) {
  std::vector<Individual> pop = {{Chromosome::from_string("1" + zeros(65)), 0.5},
                                 {Chromosome::from_string(zeros(66)), 0.5},
                                 {Chromosome::from_string("01" + zeros(64)), 0.2}};
  sort_population(pop);
  EXPECT_EQ(pop[0].fitness, 0.2);
  EXPECT_EQ(pop[1].chromosome.to_string(), zeros(66));
  std::vector<Individual> shuffled = {pop[2], pop[0], pop[1]};
  sort_population(shuffled);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(shuffled[i].chromosome, pop[i].chromosome);
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(rank_select(pop, 1.8, a).chromosome, rank_select(shuffled, 1.8, b).chromosome);
  }
}

TEST(RankSelect, UnevaluatedIsContractViolation) {
  std::vector<Individual> pop(2);
  Rng rng(6);
  EXPECT_THROW(rank_select(pop, 1.8, rng), ContractViolation);
}

TEST(Crossover, IdenticalParents) {
  Rng rng(7);
  const Chromosome p = Chromosome::random(rng);
  const auto [c1, c2] = uniform_crossover(p, p, rng);
  EXPECT_EQ(c1, p);
  EXPECT_EQ(c2, p);
}

TEST(Crossover, ComplementaryChildren) {
  Rng rng(8);
  const Chromosome p1 = Chromosome::from_string(zeros(66));
  const Chromosome p2 = Chromosome::from_string(std::string(66, '1'));
  for (int t = 0; t < 100; ++t) {
    const auto [c1, c2] = uniform_crossover(p1, p2, rng);
    for (int i = 0; i < kChromosomeBits; ++i) EXPECT_NE(c1.bit(i), c2.bit(i));
  }
}

TEST(Crossover, InheritanceFrequency) {
  Rng rng(9);
  const Chromosome p1 = Chromosome::from_string(zeros(66));
  const Chromosome p2 = Chromosome::from_string(std::string(66, '1'));
  long from_p1 = 0;
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) {
    const auto children = uniform_crossover(p1, p2, rng);
    from_p1 += !children.first.bit(t % kChromosomeBits);
  }
  EXPECT_NEAR(from_p1 / double(trials), 0.5, 0.01);
}

TEST(Mutation, Endpoints) {
  Rng rng(10);
  const Chromosome c = Chromosome::random(rng);
  EXPECT_EQ(flip_mutate(c, 0.0, rng), c);
  const Chromosome all = flip_mutate(c, 1.0, rng);
  for (int i = 0; i < kChromosomeBits; ++i) EXPECT_NE(all.bit(i), c.bit(i));
  EXPECT_THROW(flip_mutate(c, 1.5, rng), DomainError);
}

TEST(Mutation, FlipFraction) {
  Rng rng(11);
  const Chromosome c;
  long flipped = 0;
  long bits = 0;
  while (bits < 100000) {
    const Chromosome m = flip_mutate(c, 0.1, rng);
    for (int i = 0; i < kChromosomeBits; ++i) flipped += m.bit(i);
    bits += kChromosomeBits;
  }
  EXPECT_NEAR(flipped / double(bits), 0.1, 0.005);
}

TEST(Mutation, PerChromosomeModeFlipsOneBit) {
  Rng rng(12);
  const Chromosome c;
  int mutated = 0;
  for (int t = 0; t < 10000; ++t) {
    const Chromosome m = flip_mutate(c, 0.1, rng, MutationMode::kPerChromosome);
    int ones = 0;
    for (int i = 0; i < kChromosomeBits; ++i) ones += m.bit(i);
    EXPECT_LE(ones, 1);
    mutated += ones;
  }
  EXPECT_NEAR(mutated / 10000.0, 0.1, 0.015);
}

GaConfig small_config(std::uint64_t seed = 0) {
  GaConfig c;
  c.population_size = 10;
  c.generations = 6;
  c.seed = seed;
  return c;
}

FitnessFn synthetic(std::atomic<int>* calls = nullptr) {
  return [calls](const Chromosome& c) {
    if (calls) ++*calls;
    return Evaluation{synthetic_fitness(decode(c))};
  };
}

TEST(Evolve, ConstantFitness) {
  const auto r = evolve([](const Chromosome&) { return Evaluation{0.25}; }, small_config());
  EXPECT_EQ(*r.best.fitness, 0.25);
  EXPECT_LE(r.log.size(), 60u);
}

TEST(Evolve, CallsEqualDistinctChromosomes) {
  std::atomic<int> calls{0};
  GaConfig c = small_config(1);
  c.mutation_rate = 0.0;  // forces many repeats
  const auto r = evolve(synthetic(&calls), c);
  std::set<Chromosome> distinct;
  for (const auto& rec : r.log) distinct.insert(rec.chromosome);
  EXPECT_EQ(calls.load(), static_cast<int>(distinct.size()));
  EXPECT_EQ(r.log.size(), distinct.size());
  EXPECT_EQ(r.fitness_calls, calls.load());
  EXPECT_LE(calls.load(), c.population_size * c.generations);
  EXPECT_LT(calls.load(), c.population_size * c.generations);
}

TEST(Evolve, BestOfGenerationNondecreasingWithElitism) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GaConfig c;
    c.seed = seed;
    const auto r = evolve(synthetic(), c);
    ASSERT_EQ(r.best_per_generation.size(), 30u);
    for (std::size_t g = 1; g < r.best_per_generation.size(); ++g) {
      EXPECT_GE(*r.best_per_generation[g].fitness, *r.best_per_generation[g - 1].fitness);
    }
    EXPECT_EQ(*r.best.fitness, *r.best_per_generation.back().fitness);
  }
}

TEST(Evolve, Reproducible) {
  const auto a = evolve(synthetic(), small_config(3));
  const auto b = evolve(synthetic(), small_config(3));
  ASSERT_EQ(a.log.size(), b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    EXPECT_EQ(a.log[i].chromosome, b.log[i].chromosome);
    EXPECT_EQ(a.log[i].eval_index, b.log[i].eval_index);
    EXPECT_EQ(a.log[i].result.fitness, b.log[i].result.fitness);
  }
}

TEST(Evolve, WorkerCountDoesNotChangeLog) {
  EvolveOptions parallel;
  parallel.workers = 4;
  const auto a = evolve(synthetic(), small_config(4));
  const auto b = evolve(synthetic(), small_config(4), parallel);
  ASSERT_EQ(a.log.size(), b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    EXPECT_EQ(a.log[i].chromosome, b.log[i].chromosome);
    EXPECT_EQ(a.log[i].generation, b.log[i].generation);
    EXPECT_EQ(a.log[i].result.fitness, b.log[i].result.fitness);
  }
}

TEST(Evolve, PersistedResultsAreNotReevaluated) {
  const auto first = evolve(synthetic(), small_config(5));
  FitnessCache cache;
  for (const auto& rec : first.log) cache.insert(rec.chromosome, rec.result);
  std::atomic<int> calls{0};
  EvolveOptions o;
  o.persisted = &cache;
  const auto again = evolve(synthetic(&calls), small_config(5), o);
  EXPECT_EQ(calls.load(), 0);
  ASSERT_EQ(again.log.size(), first.log.size());
  for (std::size_t i = 0; i < first.log.size(); ++i) {
    EXPECT_EQ(again.log[i].chromosome, first.log[i].chromosome);
  }
}

TEST(Evolve, FitnessFailureAbortsWithPartialLog) {
  std::vector<GaLogRecord> persisted;
  EvolveOptions o;
  o.on_record = [&](const GaLogRecord& r) { persisted.push_back(r); };
  int calls = 0;
  const FitnessFn flaky = [&](const Chromosome& c) {
    if (++calls == 15) throw std::runtime_error("boom");
    return Evaluation{synthetic_fitness(decode(c))};
  };
  EXPECT_THROW(evolve(flaky, small_config(6), o), std::runtime_error);
  // Every successful evaluation, including the rest of the failing
  // generation, reaches the log before the error propagates.
  EXPECT_EQ(persisted.size(), static_cast<std::size_t>(calls - 1));
  EXPECT_GT(persisted.size(), 10u);
}

TEST(FitnessCache, FirstWriterWins) {
  FitnessCache cache;
  const Chromosome c;
  EXPECT_EQ(cache.insert(c, Evaluation{0.5}).fitness, 0.5);
  EXPECT_EQ(cache.insert(c, Evaluation{0.9}).fitness, 0.5);
  EXPECT_EQ(cache.find(c)->fitness, 0.5);
  EXPECT_EQ(cache.size(), 1u);
}

TEST(Config, Validation) {
  GaConfig c;
  c.population_size = 1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.mutation_rate = -0.1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.selection_pressure = 2.1;
  EXPECT_THROW(c.validate(), ConfigError);
}

}  // namespace
}  // namespace evotune::ga
