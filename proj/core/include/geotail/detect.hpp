#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geotail/powerlaw.hpp"
#include "geotail/quadtree.hpp"
#include "geotail/timeseries.hpp"
#include "geotail/types.hpp"

namespace geotail {

enum class EventSource { kBasic, kAdvanced };

std::string to_string(EventSource source);

/// A detected event: the quad-tree node (or cluster node) whose count series
/// passed the power-law significance test over one query window.
struct Event {
  std::string node_path;
  Region region;
  std::int64_t window_start = 0;
  std::int64_t l = 0;
  std::vector<std::string> message_ids;  // sorted by (ts, id)
  PowerLawFit fit;
  CountSeries series;
  EventSource source = EventSource::kBasic;
  std::vector<std::pair<std::string, std::int64_t>> top_tags;
};

/// Top hashtags/mentions of a message set by count, ties broken
/// lexicographically; at most limit entries.
std::vector<std::pair<std::string, std::int64_t>> top_tags_of(
    const std::vector<GeoMessage>& messages, int limit);

/// One detection pass over a query window: builds the quad-tree (messages
/// outside the region are dropped), then visits every node in pre-order,
/// binning the subtree's messages into n_min intervals and running the
/// power-law decision. Children are always visited regardless of the parent's
/// outcome; events come back in node-path order. Seeds for the per-node
/// bootstrap derive from config.seed and the node path, so results are fully
/// deterministic.
std::vector<Event> detect_window(const QueryWindow& window, const Region& region,
                                 const DetectorConfig& config, int n_threads = 1);

/// Tumbling-window driver: splits [start_ts, end_ts) into consecutive windows
/// of length config.l (the trailing partial window is skipped) and runs
/// detect_window on each, invoking sink(window_start, events) in order.
/// Defaults: start_ts = first message ts, end_ts = last message ts + 1.
/// Input must be ordered by ts up to disorder_slack seconds; worse disorder
/// throws. A late message whose window was already emitted is dropped.
struct StreamStats {
  std::int64_t windows_processed = 0;
  std::int64_t events_emitted = 0;
};

StreamStats run_stream(std::span<const GeoMessage> messages, const Region& region,
                       const DetectorConfig& config,
                       const std::function<void(std::int64_t, const std::vector<Event>&)>& sink,
                       std::optional<std::int64_t> start_ts = std::nullopt,
                       std::optional<std::int64_t> end_ts = std::nullopt, int n_threads = 1,
                       std::int64_t disorder_slack = 0);

namespace detail {

/// detect_window with an explicit event source and a seed namespace; the
/// advanced detector runs this once per semantic cluster.
std::vector<Event> detect_window_impl(const QueryWindow& window, const Region& region,
                                      const DetectorConfig& config, EventSource source,
                                      std::string_view seed_tag, int n_threads);

}  // namespace detail

}  // namespace geotail
