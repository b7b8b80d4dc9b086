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

// Binary genetic algorithm over 66-bit chromosomes: six 11-bit fixed-point
// genes (tau, gamma, alpha_critic, alpha_actor, epsilon, eta), each decoding
// to a three-decimal value in [0, 1].

#ifndef EVOTUNE_GA_HPP_
#define EVOTUNE_GA_HPP_

#include <algorithm>
#include <atomic>
#include <bitset>
#include <cmath>
#include <compare>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "evotune/errors.hpp"
#include "evotune/hyperparameters.hpp"
#include "evotune/rng.hpp"

namespace evotune::ga {

inline constexpr int kBitsPerGene = 11;
inline constexpr int kChromosomeBits = kGeneCount * kBitsPerGene;  // 66
inline constexpr int kHexChars = (kChromosomeBits + 3) / 4;        // 17
inline constexpr int kGeneMaxCode = 1000;

// Bit 0 is the most significant bit of the first (tau) gene.
class Chromosome {
 public:
  Chromosome() = default;

  static Chromosome from_string(std::string_view bits) {
    if (bits.size() != kChromosomeBits) {
      throw ShapeError("chromosome must have " + std::to_string(kChromosomeBits) +
                       " bits, got " + std::to_string(bits.size()));
    }
    Chromosome c;
    for (int i = 0; i < kChromosomeBits; ++i) {
      if (bits[i] != '0' && bits[i] != '1') throw ShapeError("chromosome: non-binary character");
      c.set(i, bits[i] == '1');
    }
    return c;
  }

  static Chromosome from_hex(std::string_view hex) {
    if (hex.size() != kHexChars) throw ShapeError("chromosome hex must have 17 characters");
    std::string bits;
    for (char h : hex) {
      int v = 0;
      if (h >= '0' && h <= '9') v = h - '0';
      else if (h >= 'a' && h <= 'f') v = h - 'a' + 10;
      else if (h >= 'A' && h <= 'F') v = h - 'A' + 10;
      else throw ShapeError("chromosome hex: invalid character");
      for (int b = 3; b >= 0; --b) bits.push_back(((v >> b) & 1) ? '1' : '0');
    }
    const std::size_t pad = bits.size() - kChromosomeBits;
    if (bits.find('1') < pad) throw ShapeError("chromosome hex: padding bits must be zero");
    return from_string(std::string_view(bits).substr(pad));
  }

  static Chromosome random(Rng& rng) {
    Chromosome c;
    std::uniform_int_distribution<int> coin(0, 1);
    for (int i = 0; i < kChromosomeBits; ++i) c.set(i, coin(rng) == 1);
    return c;
  }

  bool bit(int i) const { return bits_[static_cast<std::size_t>(i)]; }
  void set(int i, bool v) { bits_[static_cast<std::size_t>(i)] = v; }
  void flip(int i) { bits_.flip(static_cast<std::size_t>(i)); }

  std::string to_string() const {
    std::string s(kChromosomeBits, '0');
    for (int i = 0; i < kChromosomeBits; ++i) s[i] = bit(i) ? '1' : '0';
    return s;
  }

  // 17 hex digits; the bit string is left-padded with two zero bits.
  std::string to_hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    const std::string bits = std::string(kHexChars * 4 - kChromosomeBits, '0') + to_string();
    std::string out;
    for (int i = 0; i < kHexChars; ++i) {
      int v = 0;
      for (int b = 0; b < 4; ++b) v = (v << 1) | (bits[i * 4 + b] == '1');
      out.push_back(kDigits[v]);
    }
    return out;
  }

  // Two 64-bit words identifying the chromosome (for seed derivation).
  std::pair<std::uint64_t, std::uint64_t> words() const {
    std::uint64_t hi = 0, lo = 0;
    for (int i = 0; i < kChromosomeBits; ++i) {
      if (i < kChromosomeBits - 64) {
        hi = (hi << 1) | static_cast<std::uint64_t>(bit(i));
      } else {
        lo = (lo << 1) | static_cast<std::uint64_t>(bit(i));
      }
    }
    return {hi, lo};
  }

  int gene_code(int gene) const {
    int v = 0;
    for (int b = 0; b < kBitsPerGene; ++b) v = (v << 1) | bit(gene * kBitsPerGene + b);
    return v;
  }

  void set_gene_code(int gene, int code) {
    for (int b = 0; b < kBitsPerGene; ++b) {
      set(gene * kBitsPerGene + b, (code >> (kBitsPerGene - 1 - b)) & 1);
    }
  }

  bool operator==(const Chromosome& o) const { return bits_ == o.bits_; }
  // Lexicographic order of the bit string.
  std::strong_ordering operator<=>(const Chromosome& o) const { return words() <=> o.words(); }

 private:
  std::bitset<kChromosomeBits> bits_;
};

inline double decode_gene(int code) {
  return static_cast<double>(std::min(code, kGeneMaxCode)) / 1000.0;
}

inline Hyperparameters decode(const Chromosome& c) {
  Hyperparameters hp;
  for (int g = 0; g < kGeneCount; ++g) gene_ref(hp, g) = decode_gene(c.gene_code(g));
  return hp;
}

inline Hyperparameters decode(std::string_view bits) { return decode(Chromosome::from_string(bits)); }

inline int encode_gene(double value, std::string_view name = "value") {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw DomainError(std::string(name) + " = " + std::to_string(value) + " outside [0, 1]");
  }
  const double scaled = value * 1000.0;
  const double code = std::round(scaled);
  if (std::abs(scaled - code) > 1e-6) {
    throw DomainError(std::string(name) + " = " + std::to_string(value) +
                      " has more than three decimals");
  }
  return static_cast<int>(code);
}

inline Chromosome encode(const Hyperparameters& hp) {
  Chromosome c;
  for (int g = 0; g < kGeneCount; ++g) {
    c.set_gene_code(g, encode_gene(gene_value(hp, g), kGeneNames[g]));
  }
  return c;
}

struct Individual {
  Chromosome chromosome;
  std::optional<double> fitness;
};

// Ascending by fitness; ties broken by bit string so the order is total.
inline void sort_population(std::vector<Individual>& pop) {
  for (const Individual& i : pop) {
    if (!i.fitness) throw ContractViolation("sort_population: unevaluated individual");
  }
  std::sort(pop.begin(), pop.end(), [](const Individual& a, const Individual& b) {
    if (*a.fitness != *b.fitness) return *a.fitness < *b.fitness;
    return a.chromosome < b.chromosome;
  });
}

// Linear ranking: p_i = (2-s)/n + 2i(s-1)/(n(n-1)), rank 0 = worst.
inline std::vector<double> rank_probabilities(std::size_t n, double pressure) {
  if (n == 0) throw ContractViolation("rank_probabilities: empty population");
  if (!(pressure >= 1.0 && pressure <= 2.0)) throw DomainError("selection pressure outside [1, 2]");
  std::vector<double> p(n);
  if (n == 1) {
    p[0] = 1.0;
    return p;
  }
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = (2.0 - pressure) / dn + 2.0 * static_cast<double>(i) * (pressure - 1.0) / (dn * (dn - 1.0));
  }
  return p;
}

inline const Individual& rank_select(std::span<const Individual> sorted, double pressure,
                                     Rng& rng) {
  for (const Individual& i : sorted) {
    if (!i.fitness) throw ContractViolation("rank_select: unevaluated individual");
  }
  const std::vector<double> p = rank_probabilities(sorted.size(), pressure);
  const double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return sorted[i];
  }
  return sorted.back();
}

// Per bit, child1 takes p1's bit with probability 0.5 and child2 takes the other parent's.
inline std::pair<Chromosome, Chromosome> uniform_crossover(const Chromosome& p1,
                                                           const Chromosome& p2, Rng& rng) {
  std::pair<Chromosome, Chromosome> children{p1, p2};
  std::uniform_int_distribution<int> coin(0, 1);
  for (int i = 0; i < kChromosomeBits; ++i) {
    if (coin(rng) == 1) {
      children.first.set(i, p2.bit(i));
      children.second.set(i, p1.bit(i));
    }
  }
  return children;
}

enum class MutationMode {
  kPerBit,         // every bit flips independently with probability rate
  kPerChromosome,  // with probability rate, one uniformly chosen bit flips
};

inline MutationMode parse_mutation_mode(std::string_view s) {
  if (s == "per_bit") return MutationMode::kPerBit;
  if (s == "per_chromosome") return MutationMode::kPerChromosome;
  throw ConfigError("unknown mutation mode '" + std::string(s) + "' (per_bit|per_chromosome)");
}

inline Chromosome flip_mutate(const Chromosome& c, double rate, Rng& rng,
                              MutationMode mode = MutationMode::kPerBit) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw DomainError("mutation rate outside [0, 1]");
  Chromosome out = c;
  if (mode == MutationMode::kPerBit) {
    for (int i = 0; i < kChromosomeBits; ++i) {
      if (bernoulli(rng, rate)) out.flip(i);
    }
  } else if (bernoulli(rng, rate)) {
    std::uniform_int_distribution<int> pick(0, kChromosomeBits - 1);
    out.flip(pick(rng));
  }
  return out;
}

struct GaConfig {
  int population_size = 30;
  int generations = 30;
  double mutation_rate = 0.1;
  MutationMode mutation_mode = MutationMode::kPerBit;
  double selection_pressure = 1.8;
  int elitism_count = 1;
  std::uint64_t seed = 0;

  void validate() const {
    if (population_size < 2) throw ConfigError("population_size must be >= 2");
    if (generations < 1) throw ConfigError("generations must be >= 1");
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
      throw ConfigError("mutation_rate must be in [0, 1]");
    }
    if (!(selection_pressure >= 1.0 && selection_pressure <= 2.0)) {
      throw ConfigError("selection_pressure must be in [1, 2]");
    }
    if (elitism_count < 0 || elitism_count > population_size) {
      throw ConfigError("elitism_count must be in [0, population_size]");
    }
  }
};

// Result of one fitness evaluation. `epochs` and `status` carry training
// metadata for the log; synthetic fitness functions leave them defaulted.
struct Evaluation {
  double fitness = 0.0;
  int epochs = 0;
  double wall_s = 0.0;
  std::string status = "ok";
};

struct GaLogRecord {
  int generation = 0;
  int eval_index = 0;
  Chromosome chromosome;
  Evaluation result;
};

// Chromosome -> evaluation map safe for concurrent use. The first insert wins.
class FitnessCache {
 public:
  std::optional<Evaluation> find(const Chromosome& c) const {
    std::lock_guard lock(mu_);
    auto it = entries_.find(c);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  Evaluation insert(const Chromosome& c, Evaluation e) {
    std::lock_guard lock(mu_);
    return entries_.emplace(c, std::move(e)).first->second;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
  }

 private:
  mutable std::mutex mu_;
  std::map<Chromosome, Evaluation> entries_;
};

using FitnessFn = std::function<Evaluation(const Chromosome&)>;

struct EvolveOptions {
  int workers = 1;
  // Results persisted by an earlier, interrupted campaign. Hits are replayed
  // into the log without calling the fitness function.
  const FitnessCache* persisted = nullptr;
  // Called once per new evaluation, in eval_index order, after each generation.
  std::function<void(const GaLogRecord&)> on_record;
};

struct EvolveResult {
  Individual best;
  std::vector<GaLogRecord> log;
  std::vector<Individual> best_per_generation;
  int fitness_calls = 0;
};

namespace detail {

// Runs fn(i) for i in [0, n) on up to `workers` threads; returns per-index errors.
inline std::vector<std::exception_ptr> parallel_for(std::size_t n, int workers,
                                                    const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  auto run = [&](std::size_t i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(workers, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) run(i);
    return errors;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) run(i);
    });
  }
  pool.clear();
  return errors;
}

}  // namespace detail

// Generational GA. Each generation evaluates chromosomes not yet seen in this
// campaign (in parallel), sorts by fitness, keeps elitism_count elites and
// fills the rest with mutated uniform-crossover children of rank-selected
// parents. Returns the best individual ever evaluated.
inline EvolveResult evolve(const FitnessFn& fitness_fn, const GaConfig& config,
                           const EvolveOptions& options = {}) {
  config.validate();
  Rng rng(derive_seed({config.seed, 0x6761ULL}));
  const auto n = static_cast<std::size_t>(config.population_size);
  std::vector<Individual> pop(n);
  for (Individual& ind : pop) ind.chromosome = Chromosome::random(rng);

  EvolveResult result;
  std::map<Chromosome, Evaluation> campaign;  // fitness is immutable once set
  int next_eval_index = 0;

  for (int gen = 0; gen < config.generations; ++gen) {
    std::vector<Chromosome> fresh;
    std::set<Chromosome> fresh_set;
    for (const Individual& ind : pop) {
      if (!campaign.contains(ind.chromosome) && fresh_set.insert(ind.chromosome).second) {
        fresh.push_back(ind.chromosome);
      }
    }
    std::vector<std::optional<Evaluation>> evals(fresh.size());
    std::vector<std::size_t> to_call;
    for (std::size_t i = 0; i < fresh.size(); ++i) {
      if (options.persisted) evals[i] = options.persisted->find(fresh[i]);
      if (!evals[i]) to_call.push_back(i);
    }
    const auto errors = detail::parallel_for(to_call.size(), options.workers, [&](std::size_t j) {
      const std::size_t i = to_call[j];
      evals[i] = fitness_fn(fresh[i]);
    });
    result.fitness_calls += static_cast<int>(to_call.size());

    std::exception_ptr first_error;
    for (std::size_t j = 0; j < to_call.size(); ++j) {
      if (errors[j] && !first_error) first_error = errors[j];
    }
    for (std::size_t i = 0; i < fresh.size(); ++i) {
      const int eval_index = next_eval_index++;
      if (!evals[i]) continue;
      campaign.emplace(fresh[i], *evals[i]);
      GaLogRecord rec{gen, eval_index, fresh[i], *evals[i]};
      if (options.on_record) options.on_record(rec);
      result.log.push_back(std::move(rec));
    }
    if (first_error) std::rethrow_exception(first_error);

    for (Individual& ind : pop) ind.fitness = campaign.at(ind.chromosome).fitness;
    sort_population(pop);
    const Individual& gen_best = pop.back();
    result.best_per_generation.push_back(gen_best);
    if (!result.best.fitness || *gen_best.fitness > *result.best.fitness) result.best = gen_best;

    if (gen + 1 == config.generations) break;
    std::vector<Individual> next;
    next.reserve(n);
    for (int e = 0; e < config.elitism_count; ++e) next.push_back(pop[n - 1 - static_cast<std::size_t>(e)]);
    while (next.size() < n) {
      const Individual& a = rank_select(pop, config.selection_pressure, rng);
      const Individual& b = rank_select(pop, config.selection_pressure, rng);
      auto [c1, c2] = uniform_crossover(a.chromosome, b.chromosome, rng);
      next.push_back({flip_mutate(c1, config.mutation_rate, rng, config.mutation_mode), {}});
      if (next.size() < n) {
        next.push_back({flip_mutate(c2, config.mutation_rate, rng, config.mutation_mode), {}});
      }
    }
    pop = std::move(next);
  }
  return result;
}

// Smooth synthetic objective peaking at every gene = 0.5.
inline double synthetic_fitness(const Hyperparameters& hp) {
  double dist = 0.0;
  for (int g = 0; g < kGeneCount; ++g) dist += std::abs(gene_value(hp, g) - 0.5);
  return 1.0 / (1.0 + dist);
}

}  // namespace evotune::ga

#endif  // EVOTUNE_GA_HPP_
