#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "geotail/types.hpp"

namespace geotail {

/// Messages-per-interval series over [start_ts, start_ts + span). counts[i]
/// covers [start_ts + i*span/n, start_ts + (i+1)*span/n); bin edges are kept
/// as the rational span/n so fractional widths (e.g. 22.5 s) are exact.
struct CountSeries {
  std::int64_t start_ts = 0;
  std::int64_t span = 0;
  std::vector<std::int64_t> counts;

  double d() const { return static_cast<double>(span) / static_cast<double>(counts.size()); }
  std::vector<double> values() const { return {counts.begin(), counts.end()}; }
};

/// Block means of a parent series over non-overlapping blocks of size m;
/// the trailing remainder shorter than m is discarded.
struct AggregatedSeries {
  int m = 1;
  std::vector<double> values;
};

/// Bins timestamps into n_bins equal intervals of the window [start_ts,
/// start_ts + l). Throws ConfigError on a timestamp outside the window or on
/// invalid (l, n_bins).
CountSeries bin_counts(std::span<const std::int64_t> timestamps, std::int64_t start_ts,
                       std::int64_t l, int n_bins);

/// Same, over the messages of a query window.
CountSeries bin_counts(const QueryWindow& window, int n_bins);

/// Aggregated process: values[k] = mean of block k. Throws ConfigError when
/// m < 1 or m exceeds the series length.
AggregatedSeries aggregate(std::span<const double> series, int m);
AggregatedSeries aggregate(const CountSeries& series, int m);
AggregatedSeries aggregate(const AggregatedSeries& series, int m);

}  // namespace geotail
