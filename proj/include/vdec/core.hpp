#pragma once

// Orthogonal decomposition of the variance of a numeric variable along a
// chain of nested partitions induced by qualitative characters.
//
// All vectors live in R^N with the normalized inner product
//   <a, b> = (1/N) * sum_i a_i b_i
// so that ||x - mean(x)||^2 is the population variance. For a partition pi,
// conditional_mean(x, pi) replaces every entry with the mean of its class; this
// is the orthogonal projection onto vectors constant on the classes of pi.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "vdec/error.hpp"

namespace vdec {

/// Real vector of fixed length N >= 1 with finite entries.
class NumericVector {
 public:
  NumericVector() = default;

  explicit NumericVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw InvalidArgument("numeric vector must be nonempty");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) {
        throw InvalidArgument("numeric vector entry " + std::to_string(i) +
                              " is not finite");
      }
    }
  }

  NumericVector(std::initializer_list<double> values)
      : NumericVector(std::vector<double>(values)) {}

  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] auto begin() const noexcept { return values_.begin(); }
  [[nodiscard]] auto end() const noexcept { return values_.end(); }

  friend bool operator==(const NumericVector&, const NumericVector&) = default;

 private:
  std::vector<double> values_;
};

/// Assignment of N individuals to q nonempty classes, labels canonical by
/// first occurrence (label k first appears after labels 0..k-1 have appeared).
class Partition {
 public:
  Partition() = default;

  /// Validates canonical form; throws InvalidArgument otherwise.
  explicit Partition(std::vector<std::size_t> class_of) : class_of_(std::move(class_of)) {
    if (class_of_.empty()) throw InvalidArgument("partition must cover at least one individual");
    std::size_t next = 0;
    for (std::size_t i = 0; i < class_of_.size(); ++i) {
      if (class_of_[i] > next) {
        throw InvalidArgument("partition labels are not canonical at index " +
                              std::to_string(i));
      }
      if (class_of_[i] == next) ++next;
    }
    num_classes_ = next;
  }

  /// Single class holding everyone.
  static Partition trivial(std::size_t n) { return Partition(std::vector<std::size_t>(n, 0)); }

  /// Every individual in its own class.
  static Partition discrete(std::size_t n) {
    std::vector<std::size_t> labels(n);
    std::iota(labels.begin(), labels.end(), std::size_t{0});
    return Partition(std::move(labels));
  }

  /// Canonicalizes arbitrary integer keys by first occurrence.
  template <typename Key, typename Hash = std::hash<Key>>
  static Partition from_keys(std::span<const Key> keys) {
    std::unordered_map<Key, std::size_t, Hash> label_of;
    label_of.reserve(keys.size());
    std::vector<std::size_t> labels;
    labels.reserve(keys.size());
    for (const Key& key : keys) {
      auto [it, inserted] = label_of.try_emplace(key, label_of.size());
      labels.push_back(it->second);
    }
    return Partition(std::move(labels));
  }

  [[nodiscard]] std::size_t size() const noexcept { return class_of_.size(); }
  [[nodiscard]] std::size_t num_classes() const noexcept { return num_classes_; }
  [[nodiscard]] std::size_t operator[](std::size_t i) const { return class_of_[i]; }
  [[nodiscard]] std::span<const std::size_t> labels() const noexcept { return class_of_; }

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<std::size_t> class_of_;
  std::size_t num_classes_ = 0;
};

/// Named qualitative character; codes are compared by exact string equality.
class CharacterColumn {
 public:
  CharacterColumn() = default;

  CharacterColumn(std::string name, std::vector<std::string> codes)
      : name_(std::move(name)), codes_(std::move(codes)) {
    if (name_.empty()) throw InvalidArgument("character name must be nonempty");
    if (codes_.empty()) throw InvalidArgument("character '" + name_ + "' has no codes");
    for (std::size_t i = 0; i < codes_.size(); ++i) {
      if (codes_[i].empty()) {
        throw InvalidArgument("character '" + name_ + "' has a missing code at index " +
                              std::to_string(i));
      }
    }
  }

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] std::span<const std::string> codes() const noexcept { return codes_; }
  [[nodiscard]] std::size_t size() const noexcept { return codes_.size(); }

  friend bool operator==(const CharacterColumn&, const CharacterColumn&) = default;

 private:
  std::string name_;
  std::vector<std::string> codes_;
};

/// Target variable plus an ordered list of uniquely named characters, all of
/// the same length N.
class Dataset {
 public:
  Dataset() = default;

  Dataset(NumericVector target, std::vector<CharacterColumn> characters)
      : target_(std::move(target)), characters_(std::move(characters)) {
    if (target_.size() == 0) throw InvalidArgument("dataset target is empty");
    std::unordered_set<std::string> seen;
    for (const auto& column : characters_) {
      if (column.size() != target_.size()) {
        throw InvalidArgument("character '" + column.name() + "' has length " +
                              std::to_string(column.size()) + ", expected " +
                              std::to_string(target_.size()));
      }
      if (!seen.insert(column.name()).second) {
        throw InvalidArgument("duplicate character name '" + column.name() + "'");
      }
    }
  }

  [[nodiscard]] const NumericVector& target() const noexcept { return target_; }
  [[nodiscard]] std::span<const CharacterColumn> characters() const noexcept {
    return characters_;
  }
  [[nodiscard]] std::size_t size() const noexcept { return target_.size(); }
  [[nodiscard]] std::size_t num_characters() const noexcept { return characters_.size(); }

  [[nodiscard]] std::vector<std::string> character_names() const {
    std::vector<std::string> names;
    names.reserve(characters_.size());
    for (const auto& c : characters_) names.push_back(c.name());
    return names;
  }

  /// Column index of `name`; throws InvalidArgument if absent.
  [[nodiscard]] std::size_t index_of(const std::string& name) const {
    for (std::size_t i = 0; i < characters_.size(); ++i) {
      if (characters_[i].name() == name) return i;
    }
    throw InvalidArgument("unknown character '" + name + "'");
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  NumericVector target_;
  std::vector<CharacterColumn> characters_;
};

struct DecompositionStep {
  std::string character_name;
  double component = 0.0;       ///< ||E_j(X) - E_{j-1}(X)||^2
  double residual_after = 0.0;  ///< ||X - E_j(X)||^2
  std::size_t classes_after = 0;

  friend bool operator==(const DecompositionStep&, const DecompositionStep&) = default;
};

struct DecompositionResult {
  double total_variance = 0.0;
  std::vector<DecompositionStep> steps;
  double final_residual = 0.0;

  [[nodiscard]] double explained() const noexcept {
    double sum = 0.0;
    for (const auto& s : steps) sum += s.component;
    return sum;
  }

  friend bool operator==(const DecompositionResult&, const DecompositionResult&) = default;
};

namespace detail {

inline void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw InvalidArgument(std::string(what) + ": length mismatch (" + std::to_string(a) +
                          " vs " + std::to_string(b) + ")");
  }
}

}  // namespace detail

[[nodiscard]] inline double mean(std::span<const double> x) {
  if (x.empty()) throw InvalidArgument("mean of an empty vector");
  double sum = 0.0;
  for (double v : x) sum += v;
  return sum / static_cast<double>(x.size());
}

[[nodiscard]] inline double mean(const NumericVector& x) { return mean(x.values()); }

/// Normalized inner product (1/N) sum a_i b_i.
[[nodiscard]] inline double inner(std::span<const double> a, std::span<const double> b) {
  detail::require_same_length(a.size(), b.size(), "inner");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum / static_cast<double>(a.size());
}

/// ||a - b||^2 under the normalized inner product.
[[nodiscard]] inline double component_norm_sq(std::span<const double> a,
                                              std::span<const double> b) {
  detail::require_same_length(a.size(), b.size(), "component_norm_sq");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum / static_cast<double>(a.size());
}

[[nodiscard]] inline double component_norm_sq(const NumericVector& a, const NumericVector& b) {
  return component_norm_sq(a.values(), b.values());
}

/// Population variance, 1/N normalization.
[[nodiscard]] inline double variance(std::span<const double> x) {
  const double m = mean(x);
  double sum = 0.0;
  for (double v : x) sum += (v - m) * (v - m);
  return sum / static_cast<double>(x.size());
}

[[nodiscard]] inline double variance(const NumericVector& x) { return variance(x.values()); }

[[nodiscard]] inline Partition partition_from_column(const CharacterColumn& col) {
  return Partition::from_keys<std::string>(col.codes());
}

/// Common refinement of two partitions: individuals share a class iff they
/// share a class in both inputs.
[[nodiscard]] inline Partition refine(const Partition& p, const Partition& by) {
  detail::require_same_length(p.size(), by.size(), "refine");
  const std::size_t n = p.size();
  const std::uint64_t q1 = p.num_classes();
  const std::uint64_t q2 = by.num_classes();
  std::vector<std::size_t> labels(n);
  std::size_t next = 0;

  constexpr std::uint64_t kDenseLimit = std::uint64_t{1} << 22;
  constexpr auto kUnset = static_cast<std::size_t>(-1);
  if (q1 * q2 <= std::max<std::uint64_t>(kDenseLimit, 8 * n)) {
    std::vector<std::size_t> table(q1 * q2, kUnset);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t& slot = table[p[i] * q2 + by[i]];
      if (slot == kUnset) slot = next++;
      labels[i] = slot;
    }
  } else {
    std::unordered_map<std::uint64_t, std::size_t> table;
    table.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto [it, inserted] = table.try_emplace(p[i] * q2 + by[i], next);
      if (inserted) ++next;
      labels[i] = it->second;
    }
  }
  return Partition(std::move(labels));
}

[[nodiscard]] inline Partition refine(const Partition& p, const CharacterColumn& col) {
  detail::require_same_length(p.size(), col.size(), "refine");
  return refine(p, partition_from_column(col));
}

/// Vector whose i-th entry is the mean of x over the class containing i.
[[nodiscard]] inline std::vector<double> conditional_mean(std::span<const double> x,
                                                          const Partition& p) {
  detail::require_same_length(x.size(), p.size(), "conditional_mean");
  std::vector<double> sums(p.num_classes(), 0.0);
  std::vector<std::size_t> counts(p.num_classes(), 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    sums[p[i]] += x[i];
    ++counts[p[i]];
  }
  for (std::size_t k = 0; k < sums.size(); ++k) sums[k] /= static_cast<double>(counts[k]);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = sums[p[i]];
  return out;
}

[[nodiscard]] inline NumericVector conditional_mean(const NumericVector& x, const Partition& p) {
  return NumericVector(conditional_mean(x.values(), p));
}

/// Partition induced by each character column, in column order.
[[nodiscard]] inline std::vector<Partition> character_partitions(const Dataset& d) {
  std::vector<Partition> out;
  out.reserve(d.num_characters());
  for (const auto& c : d.characters()) out.push_back(partition_from_column(c));
  return out;
}

/// Product partition of the selected columns; the result depends only on the
/// set of indices, not their order.
[[nodiscard]] inline Partition product_partition(std::span<const Partition> columns,
                                                 std::span<const std::size_t> indices,
                                                 std::size_t n) {
  Partition p = Partition::trivial(n);
  for (std::size_t idx : indices) p = refine(p, columns[idx]);
  return p;
}

/// ||X - E_pi(X)||^2.
[[nodiscard]] inline double residual_norm_sq(std::span<const double> x, const Partition& p) {
  return component_norm_sq(x, conditional_mean(x, p));
}

/// Decomposition along the chain obtained by refining the trivial partition
/// with the given column partitions in order. Indices must be distinct.
[[nodiscard]] inline DecompositionResult decompose_indices(const Dataset& d,
                                                           std::span<const Partition> columns,
                                                           std::span<const std::size_t> order) {
  const auto x = d.target().values();
  DecompositionResult result;
  Partition current = Partition::trivial(d.size());
  std::vector<double> previous = conditional_mean(x, current);
  result.total_variance = component_norm_sq(x, previous);
  result.final_residual = result.total_variance;
  result.steps.reserve(order.size());
  for (std::size_t idx : order) {
    current = refine(current, columns[idx]);
    std::vector<double> next = conditional_mean(x, current);
    DecompositionStep step;
    step.character_name = d.characters()[idx].name();
    step.component = component_norm_sq(next, previous);
    step.residual_after = component_norm_sq(x, next);
    step.classes_after = current.num_classes();
    result.final_residual = step.residual_after;
    result.steps.push_back(std::move(step));
    previous = std::move(next);
  }
  return result;
}

/// Resolves names to column indices, rejecting unknown and repeated names.
[[nodiscard]] inline std::vector<std::size_t> resolve_order(const Dataset& d,
                                                            std::span<const std::string> order) {
  std::vector<std::size_t> indices;
  indices.reserve(order.size());
  std::unordered_set<std::size_t> seen;
  for (const auto& name : order) {
    const std::size_t idx = d.index_of(name);
    if (!seen.insert(idx).second) {
      throw InvalidArgument("character '" + name + "' listed more than once");
    }
    indices.push_back(idx);
  }
  return indices;
}

[[nodiscard]] inline DecompositionResult decompose_ordered(const Dataset& d,
                                                           std::span<const std::string> order) {
  const auto indices = resolve_order(d, order);
  const auto columns = character_partitions(d);
  return decompose_indices(d, columns, indices);
}

/// c_k = residual_after_k / V(X). Undefined for zero total variance.
[[nodiscard]] inline std::vector<double> residual_fractions(const DecompositionResult& r) {
  if (!(r.total_variance > 0.0)) {
    throw DegenerateError("residual fractions are undefined: total variance is zero");
  }
  std::vector<double> out;
  out.reserve(r.steps.size());
  for (const auto& s : r.steps) out.push_back(s.residual_after / r.total_variance);
  return out;
}

}  // namespace vdec
