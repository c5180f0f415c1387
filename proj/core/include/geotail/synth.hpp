#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geotail/detect.hpp"
#include "geotail/types.hpp"

namespace geotail {

/// One injected burst: per bin of width bin_d inside [start, end), the
/// message count is a discrete power-law draw; positions are Gaussian around
/// the epicenter (truncated to the region) and each message carries "#tag"
/// with probability tag_frac.
struct BurstSpec {
  double epicenter_lat = 0.0;
  double epicenter_lon = 0.0;
  double spatial_sigma = 0.01;  // degrees
  std::int64_t start = 0;
  std::int64_t end = 0;
  std::int64_t bin_d = 60;
  double alpha = 2.0;
  std::int64_t xmin = 1;
  std::string tag;
  double tag_frac = 0.6;
};

struct SyntheticScenario {
  Region region;
  std::int64_t duration = 0;     // stream covers [0, duration)
  double background_rate = 0.1;  // messages per second
  std::vector<std::string> background_vocab;
  std::vector<BurstSpec> bursts;
  std::uint64_t seed = 0;
};

void validate_scenario(const SyntheticScenario& scenario);

/// A generated stream plus ground truth: labels[i] is the burst index of
/// messages[i], or -1 for background. bursts carries the specs so evaluators
/// know each burst's window.
struct LabeledStream {
  std::vector<GeoMessage> messages;  // sorted by (ts, id)
  std::vector<int> labels;
  std::vector<BurstSpec> bursts;
};

/// Homogeneous-Poisson background plus power-law bursts, deterministic given
/// scenario.seed.
LabeledStream generate(const SyntheticScenario& scenario);

/// Exact fractional Gaussian noise via Davies-Harte circulant embedding:
/// zero mean, unit variance, autocovariance
/// gamma(k) = ((k+1)^2H - 2 k^2H + |k-1|^2H) / 2. n must be a power of two.
std::vector<double> gen_fgn(double h, std::size_t n, std::uint64_t seed);

/// Precision / pseudo-recall report. A detected event matches a burst iff
/// more than half of its messages carry that burst's label and the event
/// window overlaps the burst window. Multiple events on one burst merge into
/// a single true event but each still counts as a true detection for
/// precision. n_total counts the bursts that emitted at least min_tail
/// messages inside the evaluated windows.
struct EvalReport {
  std::int64_t n_detected = 0;
  std::int64_t n_true_detections = 0;  // events matching some burst
  std::int64_t n_true = 0;             // distinct bursts detected
  std::int64_t n_total = 0;            // detectable bursts in scope
  double precision = 1.0;
  double pseudo_recall = 0.0;
  bool precision_defined = true;  // false when n_detected == 0 (reported 1.0)
  std::vector<std::pair<int, std::int64_t>> latencies;  // (burst, detection delay s)
};

struct EvalParams {
  double label_purity = 0.5;  // fraction of event messages that must share the label
  int min_tail = 10;          // burst eligibility threshold for n_total
};

/// Windows actually evaluated by the detector, as [start, start + l) spans.
struct WindowSpan {
  std::int64_t start = 0;
  std::int64_t l = 0;
};

EvalReport evaluate(std::span<const Event> events, const LabeledStream& stream,
                    std::span<const WindowSpan> windows, const EvalParams& params = {});

}  // namespace geotail
