#pragma once

// Monte-Carlo harnesses: random character subsets as a baseline for the greedy
// ranking, recovery of known coefficient order on simulated Bernoulli data,
// and a synthetic multiple-choice exam generator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "vdec/core.hpp"
#include "vdec/soo.hpp"

namespace vdec {

/// Identity of the pseudo-random machinery; recorded in every report.
inline std::string generator_identity() {
  std::string id = "mt19937_64/seed_seq(master,trial)";
#if defined(__GLIBCXX__)
  id += "/libstdc++-" + std::to_string(__GLIBCXX__);
#elif defined(_LIBCPP_VERSION)
  id += "/libc++-" + std::to_string(_LIBCPP_VERSION);
#endif
  return id;
}

inline constexpr std::uint64_t kDefaultSeed = 20090101;

/// Independent stream for `trial` derived from the master seed.
[[nodiscard]] inline std::mt19937_64 trial_engine(std::uint64_t master, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return std::mt19937_64(seq);
}

/// Linear-interpolation quantile (q in [0,1]) of a nonempty sample.
[[nodiscard]] inline double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw InvalidArgument("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("quantile level must lie in [0,1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

// ---------------------------------------------------------------------------
// Random-subset baseline

struct BaselineConfig {
  std::size_t subset_size = 10;
  std::size_t trials = 300;
  std::uint64_t seed = kDefaultSeed;
};

struct BaselineReport {
  std::size_t subset_size = 0;
  double total_variance = 0.0;
  std::vector<std::vector<std::size_t>> subsets;  ///< sorted column indices per trial
  std::vector<double> residuals;                  ///< ||X - E_pi(X)||^2 per trial
  std::optional<double> min_random;
  std::vector<std::string> soo_order;
  std::vector<double> soo_residuals;  ///< residual after each greedy step
  double soo_residual = 0.0;
  std::string generator;

  friend bool operator==(const BaselineReport&, const BaselineReport&) = default;
};

/// Compares the greedy k-step residual against residuals of uniformly drawn
/// k-subsets of the characters.
[[nodiscard]] inline BaselineReport random_subset_baseline(const Dataset& d,
                                                           const BaselineConfig& cfg) {
  const std::size_t n = d.num_characters();
  if (cfg.subset_size < 1 || cfg.subset_size > n) {
    throw InvalidArgument("subset size " + std::to_string(cfg.subset_size) +
                          " must lie in [1, " + std::to_string(n) + "]");
  }
  const auto columns = character_partitions(d);
  const auto x = d.target().values();

  BaselineReport report;
  report.subset_size = cfg.subset_size;
  report.generator = generator_identity();
  report.total_variance = variance(x);

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  report.subsets.reserve(cfg.trials);
  report.residuals.reserve(cfg.trials);
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    auto engine = trial_engine(cfg.seed, t);
    std::vector<std::size_t> subset;
    subset.reserve(cfg.subset_size);
    std::sample(all.begin(), all.end(), std::back_inserter(subset), cfg.subset_size, engine);
    const Partition p = product_partition(columns, subset, d.size());
    report.residuals.push_back(residual_norm_sq(x, p));
    report.subsets.push_back(std::move(subset));
  }
  if (!report.residuals.empty()) {
    report.min_random = *std::min_element(report.residuals.begin(), report.residuals.end());
  }

  const SooRanking greedy = soo_rank_columns(d, columns, cfg.subset_size);
  report.soo_order = greedy.order;
  for (const auto& s : greedy.result.steps) report.soo_residuals.push_back(s.residual_after);
  report.soo_residual = greedy.result.final_residual;
  return report;
}

// ---------------------------------------------------------------------------
// Bernoulli simulation

[[nodiscard]] inline std::vector<double> descending_coefficients(std::size_t n) {
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) {
    c[i] = static_cast<double>(n - i) / static_cast<double>(n);
  }
  return c;
}

struct SimulationConfig {
  std::size_t num_characters = 10;
  std::size_t population = 100;
  std::vector<double> coefficients = descending_coefficients(10);
  double noise_sd = 0.03;
  double bernoulli_p = 0.5;
  std::size_t trials = 20;
  std::uint64_t seed = kDefaultSeed;
};

struct SimulationReport {
  std::size_t trials = 0;
  std::vector<std::vector<std::size_t>> per_trial_orders;  ///< 0-based coefficient indices
  std::size_t exact_matches = 0;
  std::size_t one_inversion = 0;
  std::string generator;

  friend bool operator==(const SimulationReport&, const SimulationReport&) = default;
};

[[nodiscard]] inline bool is_identity(std::span<const std::size_t> order) {
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] != i) return false;
  }
  return true;
}

/// True iff `order` is the identity with exactly one adjacent pair swapped.
[[nodiscard]] inline bool is_single_adjacent_inversion(std::span<const std::size_t> order) {
  std::size_t i = 0;
  while (i < order.size() && order[i] == i) ++i;
  if (i + 1 >= order.size()) return false;
  if (order[i] != i + 1 || order[i + 1] != i) return false;
  for (std::size_t j = i + 2; j < order.size(); ++j) {
    if (order[j] != j) return false;
  }
  return true;
}

inline void validate(const SimulationConfig& cfg) {
  if (cfg.num_characters < 1) throw InvalidArgument("num_characters must be at least 1");
  if (cfg.population < 1) throw InvalidArgument("population must be at least 1");
  if (cfg.coefficients.size() != cfg.num_characters) {
    throw InvalidArgument("expected " + std::to_string(cfg.num_characters) +
                          " coefficients, got " + std::to_string(cfg.coefficients.size()));
  }
  for (double c : cfg.coefficients) {
    if (!std::isfinite(c)) throw InvalidArgument("coefficients must be finite");
  }
  if (!(cfg.noise_sd >= 0.0) || !std::isfinite(cfg.noise_sd)) {
    throw InvalidArgument("noise_sd must be finite and nonnegative");
  }
  if (!(cfg.bernoulli_p > 0.0 && cfg.bernoulli_p < 1.0)) {
    throw InvalidArgument("bernoulli_p must lie strictly between 0 and 1");
  }
}

/// One simulated population: Bernoulli columns x1..xn and target
/// sum_i c_i x_i + Gaussian noise.
[[nodiscard]] inline Dataset simulate_trial(const SimulationConfig& cfg, std::uint64_t trial) {
  auto engine = trial_engine(cfg.seed, trial);
  std::bernoulli_distribution coin(cfg.bernoulli_p);
  std::normal_distribution<double> noise(0.0, cfg.noise_sd);

  std::vector<double> target(cfg.population, 0.0);
  std::vector<CharacterColumn> characters;
  characters.reserve(cfg.num_characters);
  for (std::size_t c = 0; c < cfg.num_characters; ++c) {
    std::vector<std::string> codes(cfg.population);
    for (std::size_t i = 0; i < cfg.population; ++i) {
      const bool hit = coin(engine);
      codes[i] = hit ? "1" : "0";
      if (hit) target[i] += cfg.coefficients[c];
    }
    characters.emplace_back("x" + std::to_string(c + 1), std::move(codes));
  }
  if (cfg.noise_sd > 0.0) {
    for (double& v : target) v += noise(engine);
  }
  return Dataset(NumericVector(std::move(target)), std::move(characters));
}

using SimulationObserver =
    std::function<void(std::size_t trial, const Dataset&, const SooRanking&)>;

[[nodiscard]] inline SimulationReport simulate_soo_recovery(const SimulationConfig& cfg,
                                                            const SimulationObserver& observe = {}) {
  validate(cfg);
  SimulationReport report;
  report.trials = cfg.trials;
  report.generator = generator_identity();
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const Dataset d = simulate_trial(cfg, t);
    const SooRanking ranking = soo_rank(d);
    if (observe) observe(t, d, ranking);
    if (is_identity(ranking.columns)) {
      ++report.exact_matches;
    } else if (is_single_adjacent_inversion(ranking.columns)) {
      ++report.one_inversion;
    }
    report.per_trial_orders.push_back(ranking.columns);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Synthetic exam data

/// Multiple-choice exam stand-in: each student has a standard-normal ability,
/// each question a difficulty drawn uniformly from [-spread, spread], and an
/// answer is correct with probability 1 / (1 + exp(difficulty - ability)).
/// The target is the number of correct answers.
[[nodiscard]] inline Dataset generate_exam_like(std::size_t num_questions, std::size_t population,
                                                double difficulty_spread, std::uint64_t seed) {
  if (num_questions < 1) throw InvalidArgument("num_questions must be at least 1");
  if (population < 1) throw InvalidArgument("population must be at least 1");
  if (!(difficulty_spread >= 0.0) || !std::isfinite(difficulty_spread)) {
    throw InvalidArgument("difficulty_spread must be finite and nonnegative");
  }
  auto engine = trial_engine(seed, 0);
  std::normal_distribution<double> ability_dist(0.0, 1.0);
  std::uniform_real_distribution<double> difficulty_dist(-difficulty_spread, difficulty_spread);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<double> difficulty(num_questions);
  for (double& v : difficulty) v = difficulty_dist(engine);
  std::vector<double> ability(population);
  for (double& v : ability) v = ability_dist(engine);

  const std::size_t width = std::to_string(num_questions).size();
  std::vector<double> score(population, 0.0);
  std::vector<CharacterColumn> questions;
  questions.reserve(num_questions);
  for (std::size_t q = 0; q < num_questions; ++q) {
    std::vector<std::string> codes(population);
    for (std::size_t i = 0; i < population; ++i) {
      const double p = 1.0 / (1.0 + std::exp(difficulty[q] - ability[i]));
      const bool correct = unit(engine) < p;
      codes[i] = correct ? "1" : "0";
      if (correct) score[i] += 1.0;
    }
    std::string label = std::to_string(q + 1);
    label.insert(0, width - label.size(), '0');
    questions.emplace_back("Q" + label, std::move(codes));
  }
  return Dataset(NumericVector(std::move(score)), std::move(questions));
}

}  // namespace vdec
