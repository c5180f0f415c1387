#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "geotail/advanced.hpp"
#include "geotail/detect.hpp"
#include "geotail/synth.hpp"
#include "geotail/types.hpp"

namespace geotail {

inline constexpr int kReportVersion = 1;

/// One message per line, UTF-8 JSON with fields id, ts, lat, lon, text and
/// optional hashtags/mentions arrays (derived from the text when absent).
std::string serialize_message(const GeoMessage& message);
GeoMessage parse_message(std::string_view line);  // throws ParseError

/// Reads a whole JSONL stream; parse failures carry the 1-based line number.
std::vector<GeoMessage> read_message_stream(std::istream& in);

/// Event report lines. The header pins the format version, detection mode,
/// region, config and covered span; one event per line follows, then a
/// summary footer with the window count.
struct EventReportHeader {
  std::string mode = "basic";
  Region region;
  DetectorConfig config;
  std::optional<AdvancedConfig> adv;
  std::int64_t start_ts = 0;
  std::int64_t end_ts = 0;
};

std::string serialize_report_header(const EventReportHeader& header);
EventReportHeader parse_report_header(std::string_view line);

std::string serialize_event(const Event& event);
Event parse_event(std::string_view line);

std::string serialize_summary(std::int64_t windows, std::int64_t events);

struct EventReport {
  EventReportHeader header;
  std::vector<Event> events;
  std::int64_t windows = 0;
  /// Tumbling [start + k*l, start + (k+1)*l) spans covered by the run.
  std::vector<WindowSpan> window_spans() const;
};

EventReport read_event_report(std::istream& in);

/// Label sidecar: a header carrying the scenario's region/duration and burst
/// specs, then one {id, ts, burst} line per message (burst = -1 for
/// background).
void write_labels(std::ostream& out, const LabeledStream& stream,
                  const SyntheticScenario& scenario);
LabeledStream read_labels(std::istream& in);  // messages carry id/ts only

/// Scenario file: flat key = value lines plus repeated [burst] blocks.
SyntheticScenario parse_scenario(std::istream& in);
std::string serialize_scenario(const SyntheticScenario& scenario);

}  // namespace geotail
