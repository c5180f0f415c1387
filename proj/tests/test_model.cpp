#include <doctest.h>

#include <algorithm>

#include "geotail/errors.hpp"
#include "geotail/rng.hpp"
#include "geotail/types.hpp"

using namespace geotail;

TEST_CASE("tokenize splits words and routes prefixes") {
  auto t = tokenize("Fire at #Bourke St @abcnews now");
  CHECK(t.tokens == std::vector<std::string>{"fire", "at", "bourke", "st", "now"});
  CHECK(t.hashtags == std::vector<std::string>{"bourke"});
  CHECK(t.mentions == std::vector<std::string>{"abcnews"});
}

TEST_CASE("tokenize of empty text") {
  auto t = tokenize("");
  CHECK(t.tokens.empty());
  CHECK(t.hashtags.empty());
  CHECK(t.mentions.empty());
}

TEST_CASE("tokenize preserves duplicate hashtags") {
  auto t = tokenize("#A #a");
  CHECK(t.hashtags == std::vector<std::string>{"a", "a"});
}

TEST_CASE("tokenize treats stray prefixes and punctuation") {
  auto t = tokenize("## @@x!!  don't");
  CHECK(t.mentions == std::vector<std::string>{"x"});
  CHECK(t.tokens == std::vector<std::string>{"don", "t"});
}

namespace {

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

std::string random_text(Rng& rng) {
  static const char* pieces[] = {"Fire", "#Burst", "@user", "st.",  "99",
                                 "CRASH", "at",     "#a",    "now!", "x"};
  std::string s;
  const int n = static_cast<int>(rng.uniform_below(8));
  for (int i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += pieces[rng.uniform_below(10)];
  }
  return s;
}

}  // namespace

TEST_CASE("tokenize is idempotent on its own token output") {
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const auto first = tokenize(random_text(rng));
    const auto again = tokenize(join(first.tokens));
    CHECK(again.tokens == first.tokens);
  }
}

TEST_CASE("tokenize is case-insensitive") {
  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    std::string s = random_text(rng);
    std::string upper = s;
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    const auto a = tokenize(s);
    const auto b = tokenize(upper);
    CHECK(a.tokens == b.tokens);
    CHECK(a.hashtags == b.hashtags);
    CHECK(a.mentions == b.mentions);
  }
}

TEST_CASE("query window orders by (ts, id) and checks bounds") {
  std::vector<GeoMessage> msgs;
  msgs.push_back({"b", 10, 0, 0, "", {}, {}});
  msgs.push_back({"a", 10, 0, 0, "", {}, {}});
  msgs.push_back({"c", 5, 0, 0, "", {}, {}});
  auto w = make_query_window(0, 60, msgs);
  CHECK(w.messages[0].id == "c");
  CHECK(w.messages[1].id == "a");
  CHECK(w.messages[2].id == "b");

  // ordering is deterministic regardless of input permutation
  std::swap(msgs[0], msgs[2]);
  auto w2 = make_query_window(0, 60, msgs);
  for (std::size_t i = 0; i < w.messages.size(); ++i) {
    CHECK(w.messages[i].id == w2.messages[i].id);
  }

  msgs.push_back({"d", 60, 0, 0, "", {}, {}});
  CHECK_THROWS_AS(make_query_window(0, 60, msgs), ConfigError);
}

TEST_CASE("detector config invariants") {
  DetectorConfig cfg;
  CHECK_NOTHROW(validate_config(cfg));

  cfg.n_min = 0;
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  cfg.n_min = 80;
  cfg.alpha_reject = 1.0;
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  cfg.alpha_reject = 0.05;
  cfg.n_boot = 0;
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);
}

TEST_CASE("region validation") {
  CHECK_THROWS_AS(validate_region(Region{1, 0, 0, 1}), ConfigError);
  CHECK_THROWS_AS(validate_region(Region{0, 0, 1, 200}), ConfigError);
  CHECK_NOTHROW(validate_region(Region{-38.1, 144.6, -37.5, 145.4}));
}

TEST_CASE("derive_tags fills from text only when absent") {
  GeoMessage m;
  m.text = "big #fire near @cfa";
  derive_tags(m);
  CHECK(m.hashtags == std::vector<std::string>{"fire"});
  CHECK(m.mentions == std::vector<std::string>{"cfa"});

  GeoMessage explicit_tags;
  explicit_tags.text = "big #fire";
  explicit_tags.hashtags = {"flood"};
  derive_tags(explicit_tags);
  CHECK(explicit_tags.hashtags == std::vector<std::string>{"flood"});
}
