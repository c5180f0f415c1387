#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geotail/rng.hpp"
#include "geotail/types.hpp"

namespace geotail {

/// Discrete power-law model over integers x >= xmin:
///   P(X = x) = x^(-alpha) / zeta(alpha, xmin).
struct PowerLawFit {
  double alpha = 0.0;
  std::int64_t xmin = 1;
  double ks = 0.0;
  std::int64_t n_tail = 0;
  std::optional<double> p_value;
};

struct BootstrapDiagnostics {
  int failed_replicas = 0;  // replicas whose refit failed (counted as KS = inf)
};

/// Outcome of the full pass/reject decision. All failures map to
/// passed = false with a reason; fit is present whenever fitting succeeded.
struct PowerLawDecision {
  bool passed = false;
  std::string reason;
  std::optional<PowerLawFit> fit;
  BootstrapDiagnostics boot;
};

/// Hurwitz zeta for s > 1, q >= 1 (Euler-Maclaurin; ~1e-14 relative).
double hurwitz_zeta(double s, double q);

/// Range over which the discrete MLE searches the exponent.
inline constexpr double kAlphaSearchLo = 1.01;
inline constexpr double kAlphaSearchHi = 6.0;
inline constexpr double kAlphaSearchTol = 1e-4;

/// Fits by scanning candidate cutoffs over the distinct values >= 1 present in
/// the data; for each candidate the exponent is the discrete MLE
/// (golden-section on the zeta likelihood) and the chosen xmin minimizes the
/// KS distance subject to n_tail >= min_tail. Zeros are never tail members.
/// Throws FitError (insufficient tail / degenerate tail / empty input).
PowerLawFit fit_discrete(std::span<const std::int64_t> data, int min_tail);

/// Exact sup over the integer support [xmin, inf) of |empirical CDF - model
/// CDF|, both conditioned on x >= xmin. Throws FitError on an empty tail.
double ks_distance(std::span<const std::int64_t> data, double alpha, std::int64_t xmin);

/// Inverse-transform sampler for the discrete model. Small quantiles come
/// from a precomputed CDF table; the far tail falls back to doubling + binary
/// search on the analytic CCDF.
class DiscretePowerLawSampler {
 public:
  DiscretePowerLawSampler(double alpha, std::int64_t xmin);
  std::int64_t draw(Rng& rng) const;

 private:
  double alpha_;
  std::int64_t xmin_;
  double zeta_full_;
  std::vector<double> cdf_table_;  // CDF at xmin, xmin+1, ...
};

/// n iid draws, deterministic given seed.
std::vector<std::int64_t> sample_discrete(double alpha, std::int64_t xmin, std::size_t n,
                                          std::uint64_t seed);

/// Semi-parametric bootstrap p-value: each replica draws |data| points (tail
/// from the fitted model with probability n_tail/|data|, otherwise a uniform
/// resample of the empirical body below xmin), is refit from scratch, and
/// contributes KS >= observed. Failed refits count as KS = inf (conservative).
/// Replicas use per-index derived seeds, so any thread count gives results
/// identical to sequential execution.
double significance_pvalue(std::span<const std::int64_t> data, const PowerLawFit& fit,
                           int n_boot, int min_tail, std::uint64_t seed,
                           BootstrapDiagnostics* diag = nullptr, int n_threads = 1);

/// Full decision per the detector rule: reject iff fitting fails or the
/// bootstrap p-value falls below config.alpha_reject (p exactly at the level
/// passes). Never throws for data-dependent failures.
PowerLawDecision passes_powerlaw(std::span<const std::int64_t> data,
                                 const DetectorConfig& config, int n_threads = 1);

}  // namespace geotail
