#include "geotail/selfsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fft_util.hpp"
#include "geotail/errors.hpp"

namespace geotail {

std::string to_string(HurstMethod method) {
  switch (method) {
    case HurstMethod::kAggVar: return "agg_var";
    case HurstMethod::kRs: return "rs";
    case HurstMethod::kWhittle: return "whittle";
  }
  return "?";
}

namespace {

double mean_of(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double population_variance(std::span<const double> xs) {
  const double mu = mean_of(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - mu) * (x - mu);
  return acc / static_cast<double>(xs.size());
}

void require_series(std::span<const double> series) {
  if (series.size() < kMinSeriesLen) {
    throw EstimationError("hurst: series length " + std::to_string(series.size()) +
                          " below minimum " + std::to_string(kMinSeriesLen));
  }
}

// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

std::vector<int> pow2_grid(std::size_t len, int lo, std::size_t hi_cap) {
  std::vector<int> out;
  for (std::size_t m = static_cast<std::size_t>(lo); m <= hi_cap && m <= len; m *= 2) {
    out.push_back(static_cast<int>(m));
  }
  return out;
}

}  // namespace

HurstEstimate hurst_agg_var(std::span<const double> series, std::span<const int> block_sizes) {
  require_series(series);
  const double v = population_variance(series);
  if (v <= 0.0) throw EstimationError("hurst_agg_var: zero variance");

  std::vector<int> grid(block_sizes.begin(), block_sizes.end());
  if (grid.empty()) grid = pow2_grid(series.size(), 2, series.size() / 8);

  HurstEstimate est;
  est.method = HurstMethod::kAggVar;
  std::vector<double> lx, ly;
  for (int m : grid) {
    if (m < 1 || static_cast<std::size_t>(m) > series.size()) continue;
    const auto agg = aggregate(series, m);
    const double vm = population_variance(agg.values);
    if (vm <= 0.0) continue;
    est.diagnostics.emplace_back(static_cast<double>(m), vm / v);
    lx.push_back(std::log(static_cast<double>(m)));
    ly.push_back(std::log(vm / v));
  }
  if (lx.size() < 3) throw EstimationError("hurst_agg_var: fewer than 3 usable scales");
  const double slope = ls_slope(lx, ly);
  est.h = 1.0 + slope / 2.0;  // slope = -beta, H = 1 - beta/2
  return est;
}

HurstEstimate hurst_rs(std::span<const double> series, std::span<const int> block_sizes) {
  require_series(series);
  if (population_variance(series) <= 0.0) throw EstimationError("hurst_rs: zero variance");

  std::vector<int> grid(block_sizes.begin(), block_sizes.end());
  if (grid.empty()) grid = pow2_grid(series.size(), 8, series.size() / 4);

  HurstEstimate est;
  est.method = HurstMethod::kRs;
  std::vector<double> lx, ly;
  for (int n : grid) {
    if (n < 2) continue;
    const std::size_t blocks = series.size() / static_cast<std::size_t>(n);
    if (blocks == 0) continue;
    double acc = 0.0;
    std::size_t usable = 0;
    for (std::size_t b = 0; b < blocks; ++b) {
      const auto block = series.subspan(b * static_cast<std::size_t>(n),
                                        static_cast<std::size_t>(n));
      const double mu = mean_of(block);
      const double sd = std::sqrt(population_variance(block));
      if (sd <= 0.0) continue;  // degenerate block
      double w = 0.0, w_max = 0.0, w_min = 0.0;
      for (double x : block) {
        w += x - mu;
        w_max = std::max(w_max, w);
        w_min = std::min(w_min, w);
      }
      acc += (w_max - w_min) / sd;
      ++usable;
    }
    if (usable == 0) continue;  // all blocks degenerate at this scale
    const double rs_mean = acc / static_cast<double>(usable);
    est.diagnostics.emplace_back(static_cast<double>(n), rs_mean);
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(rs_mean));
  }
  if (lx.size() < 3) throw EstimationError("hurst_rs: fewer than 3 usable scales");
  est.h = ls_slope(lx, ly);
  return est;
}

namespace {

// fGn spectral density shape (H-only factors dropped: they cancel in the
// profile objective and in the centered score variance).
double fgn_spectral_shape(double lambda, double h) {
  const double expo = -(2.0 * h + 1.0);
  double b = 0.0;
  for (int j = 1; j <= kWhittleAliasTerms; ++j) {
    const double w = 2.0 * M_PI * j;
    b += std::pow(w + lambda, expo) + std::pow(w - lambda, expo);
  }
  // Tail of the aliasing sum as an integral from kWhittleAliasTerms + 1/2.
  const double edge = 2.0 * M_PI * (kWhittleAliasTerms + 0.5);
  b += (std::pow(edge + lambda, -2.0 * h) + std::pow(edge - lambda, -2.0 * h)) /
       (4.0 * M_PI * h);
  return (1.0 - std::cos(lambda)) * (std::pow(lambda, expo) + b);
}

struct WhittleObjective {
  const std::vector<double>& lambdas;
  const std::vector<double>& periodogram;

  // log(mean(I/g)) + mean(log g): the scale-profiled Whittle criterion.
  double operator()(double h, std::vector<double>* log_g_out = nullptr) const {
    double ratio_sum = 0.0, log_sum = 0.0;
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
      const double g = fgn_spectral_shape(lambdas[j], h);
      ratio_sum += periodogram[j] / g;
      log_sum += std::log(g);
      if (log_g_out) (*log_g_out)[j] = std::log(g);
    }
    const double m = static_cast<double>(lambdas.size());
    return std::log(ratio_sum / m) + log_sum / m;
  }
};

}  // namespace

HurstEstimate hurst_whittle(std::span<const double> series) {
  require_series(series);
  const double mu = mean_of(series);
  const double v = population_variance(series);
  if (v <= 0.0) throw EstimationError("hurst_whittle: zero variance");

  std::vector<double> x(series.size());
  const double inv_sd = 1.0 / std::sqrt(v);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = (series[i] - mu) * inv_sd;

  const auto spec = detail::fft_real_forward(x);
  const std::size_t n = x.size();
  const std::size_t m = (n - 1) / 2;  // Fourier frequencies 1..m, Nyquist excluded
  std::vector<double> lambdas(m), periodogram(m);
  for (std::size_t j = 1; j <= m; ++j) {
    lambdas[j - 1] = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(n);
    periodogram[j - 1] = std::norm(spec[j]) / static_cast<double>(n);
  }

  const WhittleObjective obj{lambdas, periodogram};
  constexpr double kLo = 0.5 + 1e-3;
  constexpr double kHi = 1.0 - 1e-3;

  // Coarse grid, then golden-section refinement around the best cell.
  constexpr int kGridPoints = 17;
  double best_h = kLo, best_f = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kGridPoints; ++i) {
    const double h = kLo + (kHi - kLo) * i / (kGridPoints - 1);
    const double f = obj(h);
    if (!std::isfinite(f)) throw EstimationError("hurst_whittle: objective not finite");
    if (f < best_f) {
      best_f = f;
      best_h = h;
    }
  }
  const double step = (kHi - kLo) / (kGridPoints - 1);
  double a = std::max(kLo, best_h - step);
  double b = std::min(kHi, best_h + step);
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
  double f1 = obj(x1), f2 = obj(x2);
  while (b - a > 1e-5) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = obj(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = obj(x2);
    }
  }
  const double h_hat = 0.5 * (a + b);

  // Asymptotic se from the profiled Fisher information:
  // Var(H) ~ 1 / sum_j (v_j - v_bar)^2 with v_j = d log g(lambda_j; H) / dH.
  const double dh = 1e-4;
  std::vector<double> lg_hi(m), lg_lo(m);
  obj(std::min(h_hat + dh, kHi), &lg_hi);
  obj(std::max(h_hat - dh, kLo), &lg_lo);
  std::vector<double> score(m);
  double score_mean = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    score[j] = (lg_hi[j] - lg_lo[j]) / (2.0 * dh);
    score_mean += score[j];
  }
  score_mean /= static_cast<double>(m);
  double info = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    info += (score[j] - score_mean) * (score[j] - score_mean);
  }
  if (info <= 0.0) throw EstimationError("hurst_whittle: singular information");
  const double se = 1.0 / std::sqrt(info);

  HurstEstimate est;
  est.method = HurstMethod::kWhittle;
  est.h = h_hat;
  est.ci_low = h_hat - 1.96 * se;
  est.ci_high = h_hat + 1.96 * se;
  est.diagnostics.emplace_back(static_cast<double>(m), obj(h_hat));
  return est;
}

HurstEstimate hurst_agg_var(const CountSeries& series, std::span<const int> block_sizes) {
  const auto vals = series.values();
  return hurst_agg_var(std::span<const double>(vals), block_sizes);
}

HurstEstimate hurst_rs(const CountSeries& series, std::span<const int> block_sizes) {
  const auto vals = series.values();
  return hurst_rs(std::span<const double>(vals), block_sizes);
}

HurstEstimate hurst_whittle(const CountSeries& series) {
  const auto vals = series.values();
  return hurst_whittle(std::span<const double>(vals));
}

bool self_similar_verdict(std::span<const HurstEstimate> estimates) {
  if (estimates.empty()) throw EstimationError("verdict: no estimates");
  return std::all_of(estimates.begin(), estimates.end(),
                     [](const HurstEstimate& e) { return e.h > 0.5 && e.h < 1.0; });
}

}  // namespace geotail
