#include "geotail/timeseries.hpp"

#include <string>

#include "geotail/errors.hpp"

namespace geotail {

CountSeries bin_counts(std::span<const std::int64_t> timestamps, std::int64_t start_ts,
                       std::int64_t l, int n_bins) {
  if (l <= 0) throw ConfigError("bin_counts: l must be positive");
  if (n_bins <= 0) throw ConfigError("bin_counts: n_bins must be positive");

  CountSeries out;
  out.start_ts = start_ts;
  out.span = l;
  out.counts.assign(static_cast<std::size_t>(n_bins), 0);
  for (std::int64_t ts : timestamps) {
    const std::int64_t off = ts - start_ts;
    if (off < 0 || off >= l) {
      throw ConfigError("bin_counts: timestamp " + std::to_string(ts) +
                        " outside [start, start+l)");
    }
    // bin = floor(off * n_bins / l), exact in integers.
    const std::int64_t bin = off * n_bins / l;
    ++out.counts[static_cast<std::size_t>(bin)];
  }
  return out;
}

CountSeries bin_counts(const QueryWindow& window, int n_bins) {
  std::vector<std::int64_t> ts;
  ts.reserve(window.messages.size());
  for (const auto& m : window.messages) ts.push_back(m.ts);
  return bin_counts(ts, window.start_ts, window.l, n_bins);
}

AggregatedSeries aggregate(std::span<const double> series, int m) {
  if (m < 1) throw ConfigError("aggregate: m must be >= 1");
  const std::size_t blocks = series.size() / static_cast<std::size_t>(m);
  if (blocks == 0) throw ConfigError("aggregate: m exceeds series length");

  AggregatedSeries out;
  out.m = m;
  out.values.reserve(blocks);
  for (std::size_t k = 0; k < blocks; ++k) {
    double sum = 0.0;
    for (std::size_t j = 0; j < static_cast<std::size_t>(m); ++j) {
      sum += series[k * static_cast<std::size_t>(m) + j];
    }
    out.values.push_back(sum / m);
  }
  return out;
}

AggregatedSeries aggregate(const CountSeries& series, int m) {
  const auto vals = series.values();
  return aggregate(std::span<const double>(vals), m);
}

AggregatedSeries aggregate(const AggregatedSeries& series, int m) {
  auto out = aggregate(std::span<const double>(series.values), m);
  out.m = series.m * m;
  return out;
}

}  // namespace geotail
