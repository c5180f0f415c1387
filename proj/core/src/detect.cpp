#include "geotail/detect.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "geotail/errors.hpp"
#include "geotail/rng.hpp"

namespace geotail {

std::string to_string(EventSource source) {
  return source == EventSource::kBasic ? "basic" : "advanced";
}

std::vector<std::pair<std::string, std::int64_t>> top_tags_of(
    const std::vector<GeoMessage>& messages, int limit) {
  std::map<std::string, std::int64_t> counts;
  for (const auto& m : messages) {
    for (const auto& t : m.hashtags) ++counts[t];
    for (const auto& t : m.mentions) ++counts[t];
  }
  std::vector<std::pair<std::string, std::int64_t>> tags(counts.begin(), counts.end());
  std::sort(tags.begin(), tags.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (static_cast<int>(tags.size()) > limit) tags.resize(static_cast<std::size_t>(limit));
  return tags;
}

namespace {

constexpr int kEventTopTags = 10;

std::vector<std::int64_t> timestamps_of(const std::vector<GeoMessage>& messages) {
  std::vector<std::int64_t> ts;
  ts.reserve(messages.size());
  for (const auto& m : messages) ts.push_back(m.ts);
  return ts;
}

// Per-node check shared by the basic detector and the advanced per-cluster
// pass: bin the node's subtree into n_min intervals and run the decision.
void detect_in_node(const QuadNode& node, const QueryWindow& window,
                    const DetectorConfig& config, EventSource source, std::uint64_t seed_base,
                    int n_threads, std::vector<Event>& out) {
  auto messages = collect_subtree(node);
  std::int64_t positive_bins_possible = static_cast<std::int64_t>(messages.size());
  if (positive_bins_possible < config.min_tail) return;  // cannot form a tail

  const auto ts = timestamps_of(messages);
  auto series = bin_counts(ts, window.start_ts, window.l, config.n_min);

  DetectorConfig node_cfg = config;
  node_cfg.seed = derive_seed(seed_base, node.path.empty() ? "/" : node.path);
  auto decision = passes_powerlaw(series.counts, node_cfg, n_threads);
  if (!decision.passed) return;

  Event ev;
  ev.node_path = node.path;
  ev.region = node.region;
  ev.window_start = window.start_ts;
  ev.l = window.l;
  for (const auto& m : messages) ev.message_ids.push_back(m.id);
  ev.fit = *decision.fit;
  ev.series = std::move(series);
  ev.source = source;
  ev.top_tags = top_tags_of(messages, kEventTopTags);
  out.push_back(std::move(ev));
}

}  // namespace

namespace detail {

std::vector<Event> detect_window_impl(const QueryWindow& window, const Region& region,
                                      const DetectorConfig& config, EventSource source,
                                      std::string_view seed_tag, int n_threads) {
  validate_config(config);
  validate_region(region);
  if (config.l != window.l) {
    throw ConfigError("detect_window: config.l != window.l");
  }

  // Cheap whole-window pre-filter: every subtree series is dominated by the
  // root series, so a root with too few nonzero bins rules out all nodes.
  {
    auto root_series = bin_counts(window, config.n_min);
    std::int64_t nonzero = 0;
    for (auto c : root_series.counts) nonzero += c > 0;
    if (nonzero < config.min_tail) return {};
  }

  QuadTree tree(region, config.m_s, config.depth_max);
  for (const auto& m : window.messages) {
    if (region.contains(m.lat, m.lon)) tree.insert(m);
  }

  const std::uint64_t seed_base =
      seed_tag.empty() ? config.seed : derive_seed(config.seed, seed_tag);
  std::vector<Event> events;
  preorder(tree.root(), [&](const QuadNode& node) {
    detect_in_node(node, window, config, source, seed_base, n_threads, events);
  });
  return events;
}

}  // namespace detail

std::vector<Event> detect_window(const QueryWindow& window, const Region& region,
                                 const DetectorConfig& config, int n_threads) {
  return detail::detect_window_impl(window, region, config, EventSource::kBasic, {},
                                    n_threads);
}

StreamStats run_stream(std::span<const GeoMessage> messages, const Region& region,
                       const DetectorConfig& config,
                       const std::function<void(std::int64_t, const std::vector<Event>&)>& sink,
                       std::optional<std::int64_t> start_ts,
                       std::optional<std::int64_t> end_ts, int n_threads,
                       std::int64_t disorder_slack) {
  validate_config(config);
  StreamStats stats;
  if (messages.empty() && !start_ts) return stats;

  std::int64_t watermark = std::numeric_limits<std::int64_t>::min();
  for (const auto& m : messages) {
    if (m.ts < watermark - disorder_slack) {
      throw ConfigError("run_stream: message '" + m.id + "' arrives more than " +
                        std::to_string(disorder_slack) + "s out of order");
    }
    watermark = std::max(watermark, m.ts);
  }

  // Within the slack, disorder is absorbed by re-sorting before windowing.
  std::vector<GeoMessage> sorted;
  if (disorder_slack > 0) {
    sorted.assign(messages.begin(), messages.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const GeoMessage& a, const GeoMessage& b) { return a.ts < b.ts; });
    messages = sorted;
  }

  const std::int64_t t0 = start_ts.value_or(messages.empty() ? 0 : messages.front().ts);
  const std::int64_t t_end = end_ts.value_or(messages.empty() ? t0 : messages.back().ts + 1);

  std::size_t cursor = 0;
  while (cursor < messages.size() && messages[cursor].ts < t0) ++cursor;

  for (std::int64_t ws = t0; ws + config.l <= t_end; ws += config.l) {
    std::vector<GeoMessage> batch;
    while (cursor < messages.size() && messages[cursor].ts < ws + config.l) {
      if (messages[cursor].ts >= ws) batch.push_back(messages[cursor]);
      ++cursor;
    }
    auto window = make_query_window(ws, config.l, std::move(batch));
    auto events = detect_window(window, region, config, n_threads);
    stats.events_emitted += static_cast<std::int64_t>(events.size());
    ++stats.windows_processed;
    sink(ws, events);
  }
  return stats;
}

}  // namespace geotail
