#include <doctest.h>

#include <cmath>

#include "geotail/errors.hpp"
#include "geotail/rng.hpp"
#include "geotail/selfsim.hpp"
#include "geotail/synth.hpp"

using namespace geotail;

namespace {

std::vector<double> iid_uniform(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = rng.uniform01();
  return x;
}

HurstEstimate est(HurstMethod m, std::span<const double> x) {
  switch (m) {
    case HurstMethod::kAggVar: return hurst_agg_var(x);
    case HurstMethod::kRs: return hurst_rs(x);
    default: return hurst_whittle(x);
  }
}

}  // namespace

TEST_CASE("verdict requires every estimate strictly inside (0.5, 1)") {
  auto mk = [](double h) {
    HurstEstimate e;
    e.h = h;
    return e;
  };
  const std::vector<HurstEstimate> ny{mk(0.68), mk(0.68), mk(0.97)};
  CHECK(self_similar_verdict(ny));
  const std::vector<HurstEstimate> boundary{mk(0.5)};
  CHECK_FALSE(self_similar_verdict(boundary));
  const std::vector<HurstEstimate> mixed{mk(0.9), mk(0.45)};
  CHECK_FALSE(self_similar_verdict(mixed));
  CHECK_THROWS_AS(self_similar_verdict({}), EstimationError);
}

TEST_CASE("degenerate and short series are rejected") {
  const std::vector<double> constant(128, 3.0);
  CHECK_THROWS_AS(hurst_agg_var(constant), EstimationError);
  CHECK_THROWS_AS(hurst_rs(constant), EstimationError);
  CHECK_THROWS_AS(hurst_whittle(constant), EstimationError);

  const auto small = iid_uniform(63, 1);
  CHECK_THROWS_AS(hurst_agg_var(small), EstimationError);
  CHECK_THROWS_AS(hurst_rs(small), EstimationError);
  CHECK_THROWS_AS(hurst_whittle(small), EstimationError);

  CHECK_NOTHROW(hurst_agg_var(iid_uniform(64, 2)));
  CHECK_NOTHROW(hurst_rs(iid_uniform(64, 2)));
  CHECK_NOTHROW(hurst_whittle(iid_uniform(64, 2)));
}

TEST_CASE("estimates are scale and shift invariant") {
  const auto x = gen_fgn(0.75, 512, 10);
  for (auto method : {HurstMethod::kAggVar, HurstMethod::kRs, HurstMethod::kWhittle}) {
    const double base = est(method, x).h;
    std::vector<double> scaled(x.size()), shifted(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      scaled[i] = 3.7 * x[i];
      shifted[i] = x[i] + 11.0;
    }
    CHECK(est(method, scaled).h == doctest::Approx(base).epsilon(1e-9));
    CHECK(est(method, shifted).h == doctest::Approx(base).epsilon(1e-9));
  }
}

TEST_CASE("iid noise estimates sit near one half") {
  const auto x = iid_uniform(4096, 42);
  const double agg = hurst_agg_var(x).h;
  CHECK(agg > 0.4);
  CHECK(agg < 0.6);
  const double rs = hurst_rs(x).h;
  CHECK(rs > 0.4);
  CHECK(rs < 0.65);

  const auto x8 = iid_uniform(8192, 43);
  const double wh = hurst_whittle(x8).h;
  CHECK(wh > 0.45);
  CHECK(wh < 0.55);
}

TEST_CASE("fGn oracle recovers long memory") {
  const auto x = gen_fgn(0.8, 4096, 2020);
  const double agg = hurst_agg_var(x).h;
  CHECK(agg > 0.7);
  CHECK(agg < 0.9);

  const auto x9 = gen_fgn(0.9, 4096, 2021);
  const double rs = hurst_rs(x9).h;
  CHECK(rs > 0.8);
  CHECK(rs < 1.0);

  const auto x7 = gen_fgn(0.7, 8192, 2022);
  const auto w = hurst_whittle(x7);
  CHECK(w.h > 0.65);
  CHECK(w.h < 0.75);
  REQUIRE(w.ci_low.has_value());
  CHECK(*w.ci_low <= w.h);
  CHECK(w.h <= *w.ci_high);
}

TEST_CASE("estimator monotonicity between H=0.6 and H=0.9") {
  // Light version of the calibration suite: 8 seeds per level.
  double lo_sum[3] = {0, 0, 0}, hi_sum[3] = {0, 0, 0};
  for (int s = 0; s < 8; ++s) {
    const auto lo = gen_fgn(0.6, 2048, 300 + s);
    const auto hi = gen_fgn(0.9, 2048, 400 + s);
    lo_sum[0] += hurst_agg_var(lo).h;
    hi_sum[0] += hurst_agg_var(hi).h;
    lo_sum[1] += hurst_rs(lo).h;
    hi_sum[1] += hurst_rs(hi).h;
    lo_sum[2] += hurst_whittle(lo).h;
    hi_sum[2] += hurst_whittle(hi).h;
  }
  for (int m = 0; m < 3; ++m) CHECK(hi_sum[m] > lo_sum[m]);
}

TEST_CASE("fGn generator basics") {
  CHECK_THROWS_AS(gen_fgn(0.8, 1000, 1), ConfigError);  // not a power of two
  CHECK_THROWS_AS(gen_fgn(1.2, 1024, 1), ConfigError);

  const auto a = gen_fgn(0.7, 1024, 9);
  const auto b = gen_fgn(0.7, 1024, 9);
  CHECK(a == b);

  // lag-1 autocorrelation: gamma(1) = (2^2H - 2) / 2
  auto lag1 = [](const std::vector<double>& x) {
    double mu = 0;
    for (double v : x) mu += v;
    mu /= static_cast<double>(x.size());
    double num = 0, den = 0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) num += (x[i] - mu) * (x[i + 1] - mu);
    for (double v : x) den += (v - mu) * (v - mu);
    return num / den;
  };
  CHECK(std::abs(lag1(gen_fgn(0.5, 8192, 30))) < 0.05);
  const double expect = (std::pow(2.0, 1.6) - 2.0) / 2.0;
  CHECK(std::abs(lag1(gen_fgn(0.8, 8192, 31)) - expect) < 0.05);
}

TEST_CASE("count series overloads accept binned data") {
  CountSeries s;
  s.start_ts = 0;
  s.span = 128 * 60;
  Rng rng(555);
  for (int i = 0; i < 128; ++i) s.counts.push_back(rng.poisson(20.0));
  CHECK_NOTHROW(hurst_agg_var(s));
  CHECK_NOTHROW(hurst_rs(s));
  CHECK_NOTHROW(hurst_whittle(s));
}
