#pragma once

// Stepwise Optimal Ordering: greedy ranking of characters by the variance
// component each one explains when it refines the current partition.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "vdec/core.hpp"

namespace vdec {

/// Relative tolerance under which two candidate increments count as tied.
inline constexpr double kTieTolerance = 1e-12;

[[nodiscard]] inline bool nearly_equal(double a, double b, double rel = kTieTolerance) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

struct CandidateEvaluation {
  std::string name;
  std::size_t column = 0;
  double increment = 0.0;       ///< ||E_new - E_current||^2
  double residual_after = 0.0;  ///< ||X - E_new||^2

  friend bool operator==(const CandidateEvaluation&, const CandidateEvaluation&) = default;
};

/// Every unselected candidate considered at one greedy step, in column order.
struct StepTrace {
  std::vector<CandidateEvaluation> candidates;
  std::size_t chosen = 0;  ///< position within `candidates`

  friend bool operator==(const StepTrace&, const StepTrace&) = default;
};

struct SooRanking {
  std::vector<std::string> order;
  std::vector<std::size_t> columns;  ///< dataset column index of each entry of `order`
  DecompositionResult result;
  std::vector<StepTrace> trace;
  bool degenerate = false;  ///< total variance was zero; the order is the tie order

  friend bool operator==(const SooRanking&, const SooRanking&) = default;
};

/// Position of the largest increment; ties (within kTieTolerance) go to the
/// earliest candidate.
[[nodiscard]] inline std::size_t select_greedy(const std::vector<CandidateEvaluation>& cands) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < cands.size(); ++i) {
    const double a = cands[i].increment;
    const double b = cands[best].increment;
    if (a > b && !nearly_equal(a, b)) best = i;
  }
  return best;
}

/// Greedy ranking over precomputed column partitions.
[[nodiscard]] inline SooRanking soo_rank_columns(const Dataset& d,
                                                 std::span<const Partition> columns,
                                                 std::optional<std::size_t> max_steps = {}) {
  const std::size_t n = d.num_characters();
  if (n == 0) throw InvalidArgument("SOO ranking needs at least one character");
  const std::size_t steps = max_steps.value_or(n);
  if (steps > n) {
    throw InvalidArgument("max_steps " + std::to_string(steps) + " exceeds the " +
                          std::to_string(n) + " available characters");
  }

  const auto x = d.target().values();
  SooRanking ranking;
  Partition current = Partition::trivial(d.size());
  std::vector<double> current_mean = conditional_mean(x, current);
  ranking.result.total_variance = component_norm_sq(x, current_mean);
  ranking.result.final_residual = ranking.result.total_variance;
  ranking.degenerate = !(ranking.result.total_variance > 0.0);

  std::vector<bool> used(n, false);
  for (std::size_t step = 0; step < steps; ++step) {
    StepTrace trace;
    std::vector<Partition> refined;
    std::vector<std::vector<double>> means;
    for (std::size_t c = 0; c < n; ++c) {
      if (used[c]) continue;
      Partition p = refine(current, columns[c]);
      std::vector<double> e = conditional_mean(x, p);
      CandidateEvaluation eval;
      eval.name = d.characters()[c].name();
      eval.column = c;
      eval.increment = component_norm_sq(e, current_mean);
      eval.residual_after = component_norm_sq(x, e);
      trace.candidates.push_back(std::move(eval));
      refined.push_back(std::move(p));
      means.push_back(std::move(e));
    }
    trace.chosen = select_greedy(trace.candidates);
    const auto& pick = trace.candidates[trace.chosen];
    used[pick.column] = true;
    current = std::move(refined[trace.chosen]);
    current_mean = std::move(means[trace.chosen]);

    ranking.order.push_back(pick.name);
    ranking.columns.push_back(pick.column);
    ranking.result.steps.push_back(
        {pick.name, pick.increment, pick.residual_after, current.num_classes()});
    ranking.result.final_residual = pick.residual_after;
    ranking.trace.push_back(std::move(trace));
  }
  return ranking;
}

[[nodiscard]] inline SooRanking soo_rank(const Dataset& d,
                                         std::optional<std::size_t> max_steps = {}) {
  const auto columns = character_partitions(d);
  return soo_rank_columns(d, columns, max_steps);
}

/// Residual fractions c_k of a ranking; throws DegenerateError when V(X) = 0.
[[nodiscard]] inline std::vector<double> residual_curve(const SooRanking& r) {
  return residual_fractions(r.result);
}

struct Omission {
  std::string omitted;
  std::vector<std::string> order;  ///< SOO order of the remaining characters

  friend bool operator==(const Omission&, const Omission&) = default;
};

struct RobustnessReport {
  std::vector<std::string> full_order;
  std::vector<Omission> omissions;  ///< one per character, in column order
  bool stable = true;

  friend bool operator==(const RobustnessReport&, const RobustnessReport&) = default;
};

/// Dataset with one character column removed.
[[nodiscard]] inline Dataset without_character(const Dataset& d, std::size_t column) {
  std::vector<CharacterColumn> kept;
  kept.reserve(d.num_characters() - 1);
  for (std::size_t c = 0; c < d.num_characters(); ++c) {
    if (c != column) kept.push_back(d.characters()[c]);
  }
  return Dataset(d.target(), std::move(kept));
}

/// Re-ranks with each character left out and checks that the relative order
/// of the others is unchanged.
[[nodiscard]] inline RobustnessReport robustness_check(const Dataset& d) {
  if (d.num_characters() < 2) {
    throw InvalidArgument("robustness check needs at least two characters");
  }
  RobustnessReport report;
  report.full_order = soo_rank(d).order;
  for (std::size_t c = 0; c < d.num_characters(); ++c) {
    const std::string& name = d.characters()[c].name();
    Omission omission{name, soo_rank(without_character(d, c)).order};
    std::vector<std::string> expected;
    std::copy_if(report.full_order.begin(), report.full_order.end(),
                 std::back_inserter(expected), [&](const auto& s) { return s != name; });
    if (omission.order != expected) report.stable = false;
    report.omissions.push_back(std::move(omission));
  }
  return report;
}

}  // namespace vdec
