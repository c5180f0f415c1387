#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace geotail {

/// One geo-tagged post. Immutable after construction; safe to share across
/// threads. Timestamps are integer seconds since epoch (sub-second precision
/// is dropped on ingest).
struct GeoMessage {
  std::string id;
  std::int64_t ts = 0;
  double lat = 0.0;
  double lon = 0.0;
  std::string text;
  std::vector<std::string> hashtags;
  std::vector<std::string> mentions;
};

/// Axis-aligned lat/lon rectangle. min < max on both axes; regions spanning
/// the antimeridian are not supported.
struct Region {
  double min_lat = 0.0;
  double min_lon = 0.0;
  double max_lat = 0.0;
  double max_lon = 0.0;

  bool contains(double lat, double lon) const {
    return lat >= min_lat && lat <= max_lat && lon >= min_lon && lon <= max_lon;
  }
  double mid_lat() const { return 0.5 * (min_lat + max_lat); }
  double mid_lon() const { return 0.5 * (min_lon + max_lon); }
};

/// Throws ConfigError unless min < max on both axes.
void validate_region(const Region& r);

/// The messages currently observed: every ts lies in [start_ts, start_ts + l),
/// sorted by ts with ties broken by id.
struct QueryWindow {
  std::int64_t start_ts = 0;
  std::int64_t l = 0;  // window length, seconds
  std::vector<GeoMessage> messages;
};

/// Sorts messages canonically and checks the timestamp bounds.
QueryWindow make_query_window(std::int64_t start_ts, std::int64_t l,
                              std::vector<GeoMessage> messages);

/// Detector parameters. The bin width d = l / n_min is kept implicit so that
/// l = n_min * d holds exactly even when d is fractional (e.g. l=1800,
/// n_min=80 -> d=22.5 s); binning uses integer arithmetic on (l, n_min).
struct DetectorConfig {
  std::int64_t l = 1800;    // query window length, seconds
  int n_min = 80;           // bins per window
  int m_s = 15;             // quad-tree split threshold
  int depth_max = 8;        // quad-tree maximum depth D
  double alpha_reject = 0.05;
  int n_boot = 100;         // bootstrap replicas for the significance test
  int min_tail = 10;        // minimum tail size for an eligible fit
  std::uint64_t seed = 0;

  double d() const { return static_cast<double>(l) / n_min; }
};

/// Throws ConfigError listing the violated constraint.
void validate_config(const DetectorConfig& cfg);

struct TokenizedText {
  std::vector<std::string> tokens;
  std::vector<std::string> hashtags;
  std::vector<std::string> mentions;
};

/// Lowercases (ASCII case folding) and splits on non-alphanumeric boundaries.
/// '#'- and '@'-prefixed words are routed to hashtags/mentions with the prefix
/// stripped; hashtag words also remain ordinary tokens, mention handles do
/// not. Duplicates are preserved. Bytes >= 0x80 are treated as word
/// characters, so UTF-8 sequences stay intact (no case folding beyond ASCII).
TokenizedText tokenize(std::string_view text);

/// Fills hashtags/mentions from the text when the message does not already
/// carry explicit lists.
void derive_tags(GeoMessage& msg);

}  // namespace geotail
