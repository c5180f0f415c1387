#include "geotail/powerlaw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geotail/errors.hpp"
#include "geotail/parallel.hpp"

namespace geotail {

double hurwitz_zeta(double s, double q) {
  // Euler-Maclaurin: direct terms up to a >= 16, then the integral tail,
  // midpoint term and six Bernoulli corrections.
  static constexpr double kB2j[] = {1.0 / 6,  -1.0 / 30, 1.0 / 42,
                                    -1.0 / 30, 5.0 / 66,  -691.0 / 2730};
  static constexpr double kFact2j[] = {2.0, 24.0, 720.0, 40320.0, 3628800.0, 479001600.0};

  double acc = 0.0;
  int lead = q >= 16.0 ? 0 : static_cast<int>(std::ceil(16.0 - q));
  for (int k = 0; k < lead; ++k) acc += std::pow(q + k, -s);
  const double a = q + lead;

  acc += std::pow(a, 1.0 - s) / (s - 1.0);
  acc += 0.5 * std::pow(a, -s);

  double apow = std::pow(a, -s - 1.0);  // a^-(s+2j-1), j = 1
  double rising = s;                    // s(s+1)...(s+2j-2)
  const double inv_a2 = 1.0 / (a * a);
  for (int j = 0; j < 6; ++j) {
    acc += kB2j[j] / kFact2j[j] * rising * apow;
    rising *= (s + 2 * j + 1) * (s + 2 * j + 2);
    apow *= inv_a2;
  }
  return acc;
}

namespace {

// Distinct ascending tail values with counts; shared by the fit scan and the
// public ks_distance.
struct DistinctTail {
  std::vector<std::int64_t> values;
  std::vector<std::int64_t> counts;
};

DistinctTail distinct_tail(std::span<const std::int64_t> sorted_tail) {
  DistinctTail t;
  for (std::int64_t v : sorted_tail) {
    if (!t.values.empty() && t.values.back() == v) {
      ++t.counts.back();
    } else {
      t.values.push_back(v);
      t.counts.push_back(1);
    }
  }
  return t;
}

// Negative log-likelihood of the tail under exponent s (up to sign/constants):
// n*log zeta(s, xmin) + s * sum(log x).
double discrete_mle_alpha(std::int64_t n_tail, double sum_log, std::int64_t xmin) {
  const auto nll = [&](double s) {
    return static_cast<double>(n_tail) * std::log(hurwitz_zeta(s, static_cast<double>(xmin))) +
           s * sum_log;
  };
  // Golden-section: the log-likelihood is strictly concave in s.
  constexpr double kInvPhi = 0.6180339887498949;
  double a = kAlphaSearchLo, b = kAlphaSearchHi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = nll(x1), f2 = nll(x2);
  while (b - a > kAlphaSearchTol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = nll(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = nll(x2);
    }
  }
  return 0.5 * (a + b);
}

// Exact discrete KS over [xmin, inf). The sup of |F_emp - F_model| over all
// integers is attained either at a distinct data value or just below the next
// one (the empirical CDF is flat in between while the model CDF rises), so it
// suffices to evaluate those points.
double ks_of_distinct(const DistinctTail& t, std::size_t first, double alpha,
                      std::int64_t xmin) {
  const double z_min = hurwitz_zeta(alpha, static_cast<double>(xmin));
  std::int64_t n_tail = 0;
  for (std::size_t i = first; i < t.counts.size(); ++i) n_tail += t.counts[i];

  double ks = 0.0;
  double zv = t.values[first] == xmin
                  ? z_min
                  : hurwitz_zeta(alpha, static_cast<double>(t.values[first]));
  // Gap [xmin, v_first - 1], where F_emp = 0.
  if (t.values[first] > xmin) ks = std::abs(1.0 - zv / z_min);

  std::int64_t cum = 0;
  for (std::size_t i = first; i < t.values.size(); ++i) {
    const double v = static_cast<double>(t.values[i]);
    cum += t.counts[i];
    const double f_emp = static_cast<double>(cum) / static_cast<double>(n_tail);
    const double f_model_at_v = 1.0 - (zv - std::pow(v, -alpha)) / z_min;
    ks = std::max(ks, std::abs(f_emp - f_model_at_v));
    if (i + 1 < t.values.size()) {
      // Just below the next distinct value.
      const double zn = hurwitz_zeta(alpha, static_cast<double>(t.values[i + 1]));
      ks = std::max(ks, std::abs(f_emp - (1.0 - zn / z_min)));
      zv = zn;
    }
  }
  return ks;
}

std::vector<std::int64_t> sorted_positive(std::span<const std::int64_t> data) {
  std::vector<std::int64_t> xs;
  xs.reserve(data.size());
  for (std::int64_t v : data) {
    if (v >= 1) xs.push_back(v);
  }
  std::sort(xs.begin(), xs.end());
  return xs;
}

}  // namespace

PowerLawFit fit_discrete(std::span<const std::int64_t> data, int min_tail) {
  if (data.empty()) throw FitError(FitError::Reason::kInvalidArgument, "fit: empty input");
  if (min_tail < 2) throw FitError(FitError::Reason::kInvalidArgument, "fit: min_tail < 2");

  const auto xs = sorted_positive(data);
  if (static_cast<int>(xs.size()) < min_tail) {
    throw FitError(FitError::Reason::kInsufficientTail,
                   "fit: only " + std::to_string(xs.size()) + " values >= 1, need " +
                       std::to_string(min_tail));
  }
  const auto t = distinct_tail(xs);
  if (t.values.size() < 2) {
    throw FitError(FitError::Reason::kDegenerateTail, "fit: fewer than 2 distinct tail values");
  }

  // Suffix log sums: slog[i] = sum of log(x) over xs[i..].
  std::vector<double> slog(xs.size() + 1, 0.0);
  for (std::size_t i = xs.size(); i-- > 0;) {
    slog[i] = slog[i + 1] + std::log(static_cast<double>(xs[i]));
  }

  bool found = false;
  PowerLawFit best;
  std::size_t start = 0;  // index of the candidate's first element in xs
  for (std::size_t di = 0; di < t.values.size(); ++di) {
    const std::int64_t n_tail = static_cast<std::int64_t>(xs.size() - start);
    if (n_tail < min_tail) break;  // larger cutoffs only shrink the tail
    if (t.values.size() - di >= 2) {
      const std::int64_t xmin = t.values[di];
      const double alpha = discrete_mle_alpha(n_tail, slog[start], xmin);
      const double ks = ks_of_distinct(t, di, alpha, xmin);
      if (!found || ks < best.ks) {
        best = PowerLawFit{alpha, xmin, ks, n_tail, std::nullopt};
        found = true;
      }
    }
    start += static_cast<std::size_t>(t.counts[di]);
  }
  if (!found) {
    throw FitError(FitError::Reason::kDegenerateTail, "fit: no eligible cutoff");
  }
  return best;
}

double ks_distance(std::span<const std::int64_t> data, double alpha, std::int64_t xmin) {
  if (xmin < 1) throw FitError(FitError::Reason::kInvalidArgument, "ks: xmin must be >= 1");
  std::vector<std::int64_t> tail;
  for (std::int64_t v : data) {
    if (v >= xmin) tail.push_back(v);
  }
  if (tail.empty()) throw FitError(FitError::Reason::kInsufficientTail, "ks: empty tail");
  std::sort(tail.begin(), tail.end());
  const auto t = distinct_tail(tail);
  return ks_of_distinct(t, 0, alpha, xmin);
}

DiscretePowerLawSampler::DiscretePowerLawSampler(double alpha, std::int64_t xmin)
    : alpha_(alpha), xmin_(xmin) {
  if (alpha <= 1.0 || xmin < 1) {
    throw FitError(FitError::Reason::kInvalidArgument, "sampler: need alpha > 1, xmin >= 1");
  }
  zeta_full_ = hurwitz_zeta(alpha_, static_cast<double>(xmin_));
  // CDF table for the bulk; the far tail uses the analytic CCDF. 4096 entries
  // cover all but ~1e-5 of the mass even at alpha close to 1.
  constexpr std::size_t kTable = 4096;
  cdf_table_.reserve(kTable);
  double ccdf = 1.0;  // P(X >= xmin + i) / 1, running
  double z = zeta_full_;
  for (std::size_t i = 0; i < kTable; ++i) {
    const double x = static_cast<double>(xmin_) + static_cast<double>(i);
    z -= std::pow(x, -alpha_);  // zeta(alpha, x+1)
    ccdf = z / zeta_full_;
    cdf_table_.push_back(1.0 - ccdf);
  }
}

std::int64_t DiscretePowerLawSampler::draw(Rng& rng) const {
  const double u = rng.uniform01();
  // Table lookup: smallest index with CDF >= u.
  auto it = std::lower_bound(cdf_table_.begin(), cdf_table_.end(), u);
  if (it != cdf_table_.end()) {
    return xmin_ + static_cast<std::int64_t>(it - cdf_table_.begin());
  }
  // Far tail: find smallest x with zeta(alpha, x+1)/zeta(alpha, xmin) <= 1-u
  // by doubling then bisecting on the CCDF.
  const double target = (1.0 - u) * zeta_full_;
  std::int64_t lo = xmin_ + static_cast<std::int64_t>(cdf_table_.size()) - 1;
  std::int64_t hi = lo * 2;
  const auto ccdf_above = [&](std::int64_t x) {
    return hurwitz_zeta(alpha_, static_cast<double>(x) + 1.0);
  };
  // Cap astronomically deep tails (reachable only for alpha near 1, where the
  // integer range runs out before the quantile does).
  constexpr std::int64_t kDrawCap = std::int64_t{1} << 62;
  while (ccdf_above(hi) > target) {
    if (hi >= kDrawCap) return hi;
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (ccdf_above(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

std::vector<std::int64_t> sample_discrete(double alpha, std::int64_t xmin, std::size_t n,
                                          std::uint64_t seed) {
  DiscretePowerLawSampler sampler(alpha, xmin);
  Rng rng(seed);
  std::vector<std::int64_t> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sampler.draw(rng));
  return out;
}

double significance_pvalue(std::span<const std::int64_t> data, const PowerLawFit& fit,
                           int n_boot, int min_tail, std::uint64_t seed,
                           BootstrapDiagnostics* diag, int n_threads) {
  if (n_boot <= 0) throw ConfigError("significance: n_boot must be positive");

  std::vector<std::int64_t> body;
  for (std::int64_t v : data) {
    if (v < fit.xmin) body.push_back(v);
  }
  const double p_tail =
      static_cast<double>(fit.n_tail) / static_cast<double>(data.size());
  const DiscretePowerLawSampler sampler(fit.alpha, fit.xmin);

  std::vector<double> ks(static_cast<std::size_t>(n_boot));
  std::vector<unsigned char> failed(static_cast<std::size_t>(n_boot), 0);
  parallel_for(static_cast<std::size_t>(n_boot), n_threads, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    std::vector<std::int64_t> synth;
    synth.reserve(data.size());
    for (std::size_t j = 0; j < data.size(); ++j) {
      if (body.empty() || rng.uniform01() < p_tail) {
        synth.push_back(sampler.draw(rng));
      } else {
        synth.push_back(body[rng.uniform_below(body.size())]);
      }
    }
    try {
      ks[i] = fit_discrete(synth, min_tail).ks;
    } catch (const FitError&) {
      ks[i] = std::numeric_limits<double>::infinity();
      failed[i] = 1;
    }
  });

  int n_ge = 0, n_failed = 0;
  for (int i = 0; i < n_boot; ++i) {
    if (ks[static_cast<std::size_t>(i)] >= fit.ks) ++n_ge;
    n_failed += failed[static_cast<std::size_t>(i)];
  }
  if (diag) diag->failed_replicas = n_failed;
  return static_cast<double>(n_ge) / static_cast<double>(n_boot);
}

PowerLawDecision passes_powerlaw(std::span<const std::int64_t> data,
                                 const DetectorConfig& config, int n_threads) {
  PowerLawDecision out;
  std::int64_t positive = 0;
  for (std::int64_t v : data) positive += v >= 1;
  if (positive < config.min_tail) {
    out.reason = "insufficient-tail";
    return out;
  }
  PowerLawFit fit;
  try {
    fit = fit_discrete(data, config.min_tail);
  } catch (const FitError& e) {
    out.reason = e.reason() == FitError::Reason::kDegenerateTail ? "degenerate-tail"
                                                                 : "insufficient-tail";
    return out;
  }
  fit.p_value = significance_pvalue(data, fit, config.n_boot, config.min_tail, config.seed,
                                    &out.boot, n_threads);
  out.fit = fit;
  if (*fit.p_value < config.alpha_reject) {
    out.reason = "rejected";
    return out;
  }
  out.passed = true;
  return out;
}

}  // namespace geotail
