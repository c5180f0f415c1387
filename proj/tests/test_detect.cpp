#include <doctest.h>

#include <set>

#include "geotail/detect.hpp"
#include "geotail/errors.hpp"
#include "geotail/io.hpp"
#include "geotail/synth.hpp"

using namespace geotail;

namespace {

const Region kMelbourne{-38.1, 144.6, -37.5, 145.4};

DetectorConfig melbourne_config() {
  DetectorConfig cfg;
  cfg.l = 1800;
  cfg.n_min = 80;
  cfg.m_s = 15;
  cfg.depth_max = 8;
  cfg.n_boot = 100;
  cfg.min_tail = 40;
  cfg.seed = 4242;
  return cfg;
}

SyntheticScenario burst_scenario(std::uint64_t seed) {
  SyntheticScenario sc;
  sc.region = kMelbourne;
  sc.duration = 1800;
  sc.background_rate = 0.02;
  sc.background_vocab = {"coffee", "train", "tram", "rain"};
  sc.seed = seed;
  BurstSpec b;
  b.epicenter_lat = -37.81;
  b.epicenter_lon = 144.96;
  b.spatial_sigma = 0.007;
  b.start = 120;
  b.end = 1560;  // 8 bins of 180s
  b.bin_d = 180;
  b.alpha = 2.5;
  b.xmin = 14;
  b.tag = "fire";
  b.tag_frac = 0.75;
  sc.bursts.push_back(b);
  return sc;
}

}  // namespace

TEST_CASE("empty window produces no events") {
  auto cfg = melbourne_config();
  auto window = make_query_window(0, cfg.l, {});
  CHECK(detect_window(window, kMelbourne, cfg).empty());
}

TEST_CASE("config and window length must agree") {
  auto cfg = melbourne_config();
  auto window = make_query_window(0, 900, {});
  CHECK_THROWS_AS(detect_window(window, kMelbourne, cfg), ConfigError);
}

TEST_CASE("an injected burst is detected around its epicenter") {
  auto sc = burst_scenario(2024);
  auto stream = generate(sc);
  auto cfg = melbourne_config();
  auto window = make_query_window(0, cfg.l, stream.messages);
  auto events = detect_window(window, kMelbourne, cfg);
  REQUIRE_FALSE(events.empty());
  bool contains_epicenter = false;
  for (const auto& ev : events) {
    if (ev.region.contains(-37.81, 144.96)) contains_epicenter = true;
    CHECK(ev.fit.p_value.has_value());
    CHECK(*ev.fit.p_value >= cfg.alpha_reject);
    CHECK(ev.source == EventSource::kBasic);
  }
  CHECK(contains_epicenter);

  // events come back in node-path order
  for (std::size_t i = 1; i < events.size(); ++i) {
    CHECK(events[i - 1].node_path < events[i].node_path);
  }
}

TEST_CASE("detection is deterministic and thread-count independent") {
  auto sc = burst_scenario(31);
  auto stream = generate(sc);
  auto cfg = melbourne_config();
  auto window = make_query_window(0, cfg.l, stream.messages);

  auto serialize_all = [](const std::vector<Event>& events) {
    std::string out;
    for (const auto& ev : events) out += serialize_event(ev) + "\n";
    return out;
  };
  const auto once = serialize_all(detect_window(window, kMelbourne, cfg, 1));
  const auto twice = serialize_all(detect_window(window, kMelbourne, cfg, 1));
  const auto threaded = serialize_all(detect_window(window, kMelbourne, cfg, 4));
  CHECK(once == twice);
  CHECK(once == threaded);
}

TEST_CASE("run_stream processes exactly the full tumbling windows") {
  // 31 days at Melbourne's window length: 31 * 48 windows.
  SyntheticScenario sc;
  sc.region = kMelbourne;
  sc.duration = 31 * 86400;
  sc.background_rate = 0.0008;  // sparse: every window fails the pre-filter fast
  sc.background_vocab = {"coffee"};
  sc.seed = 99;
  auto stream = generate(sc);

  auto cfg = melbourne_config();
  std::int64_t windows = 0;
  std::int64_t last_start = -1;
  auto stats = run_stream(
      stream.messages, kMelbourne, cfg,
      [&](std::int64_t ws, const std::vector<Event>&) {
        ++windows;
        if (last_start >= 0) CHECK(ws == last_start + cfg.l);
        last_start = ws;
      },
      0, sc.duration);
  CHECK(stats.windows_processed == 31 * 48);
  CHECK(windows == 31 * 48);
}

TEST_CASE("streams shorter than one window process nothing") {
  auto cfg = melbourne_config();
  std::vector<GeoMessage> msgs;
  GeoMessage m;
  m.id = "a";
  m.ts = 100;
  m.lat = -37.8;
  m.lon = 144.9;
  msgs.push_back(m);
  auto stats = run_stream(msgs, kMelbourne, cfg,
                          [](std::int64_t, const std::vector<Event>&) { CHECK(false); });
  CHECK(stats.windows_processed == 0);
}

TEST_CASE("consecutive windows never share messages") {
  auto sc = burst_scenario(7);
  sc.duration = 5400;
  auto stream = generate(sc);
  auto cfg = melbourne_config();
  cfg.min_tail = 10;
  std::set<std::string> seen;
  run_stream(
      stream.messages, kMelbourne, cfg,
      [&](std::int64_t, const std::vector<Event>& events) {
        std::set<std::string> here;
        for (const auto& ev : events) here.insert(ev.message_ids.begin(), ev.message_ids.end());
        for (const auto& id : here) CHECK(seen.count(id) == 0);
        seen.insert(here.begin(), here.end());
      },
      0, sc.duration);
}

TEST_CASE("out-of-order input beyond the slack is rejected") {
  auto cfg = melbourne_config();
  std::vector<GeoMessage> msgs;
  GeoMessage a, b;
  a.id = "a";
  a.ts = 1000;
  a.lat = -37.8;
  a.lon = 144.9;
  b = a;
  b.id = "b";
  b.ts = 900;
  msgs.push_back(a);
  msgs.push_back(b);

  auto sink = [](std::int64_t, const std::vector<Event>&) {};
  CHECK_THROWS_AS(run_stream(msgs, kMelbourne, cfg, sink), ConfigError);
  CHECK_NOTHROW(run_stream(msgs, kMelbourne, cfg, sink, std::nullopt, std::nullopt, 1, 120));
}

TEST_CASE("top_tags_of counts and orders tags") {
  std::vector<GeoMessage> msgs(5);
  for (auto& m : msgs) m.hashtags = {"fire"};
  msgs[0].hashtags.push_back("melb");
  msgs[1].mentions = {"cfa"};
  msgs[2].mentions = {"cfa"};
  auto tags = top_tags_of(msgs, 2);
  REQUIRE(tags.size() == 2);
  CHECK(tags[0].first == "fire");
  CHECK(tags[0].second == 5);
  CHECK(tags[1].first == "cfa");
  CHECK(tags[1].second == 2);
}
