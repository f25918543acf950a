#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "vdec/error.hpp"

namespace vdec {

/// Right-open bins [edges[i], edges[i+1]).
struct Histogram {
  std::vector<double> bin_edges;
  std::vector<std::size_t> counts;
  std::size_t out_of_range = 0;

  friend bool operator==(const Histogram&, const Histogram&) = default;
};

/// Bins of width `bin_width` starting at `origin`. Without `num_bins` the
/// range is extended just far enough to hold the largest value (one bin for
/// empty input). Values outside the bins are tallied in `out_of_range`.
[[nodiscard]] inline Histogram histogram(std::span<const double> values, double bin_width,
                                         double origin, std::optional<std::size_t> num_bins = {}) {
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
    throw InvalidArgument("histogram bin width must be positive");
  }
  if (!std::isfinite(origin)) throw InvalidArgument("histogram origin must be finite");
  if (num_bins && *num_bins == 0) throw InvalidArgument("histogram needs at least one bin");

  std::size_t bins = 1;
  if (num_bins) {
    bins = *num_bins;
  } else {
    for (double v : values) {
      if (v >= origin) {
        const auto need = static_cast<std::size_t>(std::floor((v - origin) / bin_width)) + 1;
        bins = std::max(bins, need);
      }
    }
  }

  Histogram h;
  h.bin_edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    h.bin_edges[i] = origin + static_cast<double>(i) * bin_width;
  }
  h.counts.assign(bins, 0);

  for (double v : values) {
    if (!(v >= h.bin_edges.front()) || !(v < h.bin_edges.back())) {
      // Auto-sized bins must hold every value >= origin; nudge the last edge
      // case where rounding put the maximum exactly on the upper edge.
      if (!num_bins && v >= origin) {
        h.bin_edges.push_back(h.bin_edges.back() + bin_width);
        h.counts.push_back(0);
      } else {
        ++h.out_of_range;
        continue;
      }
    }
    auto i = static_cast<std::size_t>(std::floor((v - origin) / bin_width));
    i = std::min(i, h.counts.size() - 1);
    while (i > 0 && v < h.bin_edges[i]) --i;
    while (i + 1 < h.counts.size() && v >= h.bin_edges[i + 1]) ++i;
    ++h.counts[i];
  }
  return h;
}

}  // namespace vdec
