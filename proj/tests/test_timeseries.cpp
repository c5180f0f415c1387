#include <doctest.h>

#include <numeric>

#include "geotail/errors.hpp"
#include "geotail/rng.hpp"
#include "geotail/timeseries.hpp"

using namespace geotail;

TEST_CASE("bin_counts basics") {
  CHECK(bin_counts(std::vector<std::int64_t>{}, 0, 60, 6).counts ==
        std::vector<std::int64_t>{0, 0, 0, 0, 0, 0});

  const std::vector<std::int64_t> ts{0, 5, 25};
  CHECK(bin_counts(ts, 0, 30, 3).counts == std::vector<std::int64_t>{2, 0, 1});

  const std::vector<std::int64_t> boundary{30};
  CHECK_THROWS_AS(bin_counts(boundary, 0, 30, 3), ConfigError);
}

TEST_CASE("bin_counts handles fractional bin widths exactly") {
  // l=1800, n_min=80 -> d=22.5s; the second bin starts at t=22.5, so t=22
  // lands in bin 0 and t=23 in bin 1.
  const std::vector<std::int64_t> ts{22, 23};
  auto s = bin_counts(ts, 0, 1800, 80);
  CHECK(s.counts[0] == 1);
  CHECK(s.counts[1] == 1);
  CHECK(s.d() == doctest::Approx(22.5));
}

TEST_CASE("aggregate definition and remainder rule") {
  const std::vector<double> x{1, 2, 3, 4};
  CHECK(aggregate(x, 2).values == std::vector<double>{1.5, 3.5});
  CHECK(aggregate(x, 1).values == std::vector<double>{1, 2, 3, 4});

  const std::vector<double> odd{1, 2, 3, 4, 5};
  CHECK(aggregate(odd, 2).values == std::vector<double>{1.5, 3.5});

  CHECK_THROWS_AS(aggregate(x, 5), ConfigError);
  CHECK_THROWS_AS(aggregate(x, 0), ConfigError);
}

TEST_CASE("bin_counts conserves message count") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::int64_t l = 600;
    std::vector<std::int64_t> ts;
    const int n = static_cast<int>(rng.uniform_below(200));
    for (int i = 0; i < n; ++i) ts.push_back(rng.uniform_int(0, l - 1));
    auto s = bin_counts(ts, 0, l, 40);
    CHECK(std::accumulate(s.counts.begin(), s.counts.end(), std::int64_t{0}) == n);
  }
}

TEST_CASE("aggregate composes and preserves the mean") {
  Rng rng(4);
  std::vector<double> x(240);
  for (auto& v : x) v = rng.uniform01() * 10.0;

  const auto two_step = aggregate(aggregate(x, 4), 3);
  const auto one_step = aggregate(x, 12);
  REQUIRE(two_step.values.size() == one_step.values.size());
  for (std::size_t i = 0; i < one_step.values.size(); ++i) {
    CHECK(two_step.values[i] == doctest::Approx(one_step.values[i]).epsilon(1e-12));
  }
  CHECK(two_step.m == 12);

  const double mean_x = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  const auto agg = aggregate(x, 8).values;  // 240 divisible by 8
  const double mean_agg = std::accumulate(agg.begin(), agg.end(), 0.0) / agg.size();
  CHECK(mean_agg == doctest::Approx(mean_x).epsilon(1e-12));
}
