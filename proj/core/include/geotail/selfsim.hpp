#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geotail/timeseries.hpp"

namespace geotail {

enum class HurstMethod { kAggVar, kRs, kWhittle };

std::string to_string(HurstMethod method);

/// A single Hurst-parameter estimate. diagnostics holds the (scale, statistic)
/// pairs the estimate was regressed from: (m, V_m/V) for aggregate variance,
/// (n, mean R/S) for R/S, and (periodogram size, minimized objective) for
/// Whittle. Only Whittle produces a confidence interval.
struct HurstEstimate {
  HurstMethod method = HurstMethod::kAggVar;
  double h = 0.0;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  std::vector<std::pair<double, double>> diagnostics;
};

/// Minimum series length accepted by all estimators.
inline constexpr std::size_t kMinSeriesLen = 64;

/// Aggregate-variance estimator: least-squares slope s of log(V_m/V) against
/// log(m); H = 1 + s/2. Default block sizes are powers of two from 2 up to
/// length/8. Throws EstimationError on short or degenerate input.
HurstEstimate hurst_agg_var(std::span<const double> series,
                            std::span<const int> block_sizes = {});

/// R/S estimator: per block of size n, R = range of mean-adjusted cumulative
/// sums, S = block standard deviation; H = slope of log(mean R/S) vs log(n).
/// Degenerate blocks (S = 0) are skipped, scales with no usable block are
/// dropped, and fewer than 3 usable scales is an error.
HurstEstimate hurst_rs(std::span<const double> series,
                       std::span<const int> block_sizes = {});

/// Whittle estimator: minimizes the profile Whittle objective of the fGn
/// spectral density over the periodogram of the demeaned, variance-normalized
/// series; H searched in (0.5, 1). The spectral density uses the truncated
/// aliasing sum (kWhittleAliasTerms terms) plus an integral tail correction.
/// ci is the asymptotic +-1.96 * se interval.
HurstEstimate hurst_whittle(std::span<const double> series);

inline constexpr int kWhittleAliasTerms = 200;

HurstEstimate hurst_agg_var(const CountSeries& series, std::span<const int> block_sizes = {});
HurstEstimate hurst_rs(const CountSeries& series, std::span<const int> block_sizes = {});
HurstEstimate hurst_whittle(const CountSeries& series);

/// True iff every estimate lies strictly inside (0.5, 1).
bool self_similar_verdict(std::span<const HurstEstimate> estimates);

}  // namespace geotail
