#include "geotail/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "geotail/errors.hpp"
#include "geotail/powerlaw.hpp"
#include "geotail/rng.hpp"

namespace geotail {

void validate_scenario(const SyntheticScenario& scenario) {
  validate_region(scenario.region);
  if (scenario.duration <= 0) throw ConfigError("scenario: duration must be positive");
  if (!(scenario.background_rate > 0.0)) {
    throw ConfigError("scenario: background_rate must be positive");
  }
  for (std::size_t i = 0; i < scenario.bursts.size(); ++i) {
    const auto& b = scenario.bursts[i];
    const std::string where = "scenario burst " + std::to_string(i);
    if (!(b.alpha > 1.0)) throw ConfigError(where + ": alpha must be > 1");
    if (b.xmin < 1) throw ConfigError(where + ": xmin must be >= 1");
    if (!(b.start < b.end)) throw ConfigError(where + ": start must be < end");
    if (b.start < 0 || b.end > scenario.duration) {
      throw ConfigError(where + ": window outside stream duration");
    }
    if (b.bin_d < 1) throw ConfigError(where + ": bin_d must be >= 1");
    if (!(b.spatial_sigma > 0.0)) throw ConfigError(where + ": spatial_sigma must be > 0");
    if (b.tag_frac < 0.0 || b.tag_frac > 1.0) {
      throw ConfigError(where + ": tag_frac must be in [0, 1]");
    }
    if (!scenario.region.contains(b.epicenter_lat, b.epicenter_lon)) {
      throw ConfigError(where + ": epicenter outside region");
    }
  }
}

namespace {

std::string zero_pad(std::int64_t v, int width) {
  std::string s = std::to_string(v);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

// Burst messages share a small topical lexicon derived from the tag, so the
// semantic clustering step has something to latch onto. The first entry is an
// anchor present in every message of the burst.
std::vector<std::string> burst_lexicon(const std::string& tag) {
  return {tag + "scene", tag + "live", tag + "here", tag + "news", tag + "watch"};
}

struct LabeledMessage {
  GeoMessage msg;
  int label;
};

}  // namespace

LabeledStream generate(const SyntheticScenario& scenario) {
  validate_scenario(scenario);
  std::vector<LabeledMessage> all;

  // Background: homogeneous Poisson arrivals, uniform positions, 5 vocab
  // tokens per message.
  {
    Rng rng(derive_seed(scenario.seed, "background"));
    double t = -std::log(1.0 - rng.uniform01()) / scenario.background_rate;
    std::int64_t seq = 0;
    while (t < static_cast<double>(scenario.duration)) {
      GeoMessage m;
      m.id = "bg-" + zero_pad(seq++, 7);
      m.ts = static_cast<std::int64_t>(t);
      m.lat = scenario.region.min_lat +
              rng.uniform01() * (scenario.region.max_lat - scenario.region.min_lat);
      m.lon = scenario.region.min_lon +
              rng.uniform01() * (scenario.region.max_lon - scenario.region.min_lon);
      if (!scenario.background_vocab.empty()) {
        for (int w = 0; w < 5; ++w) {
          if (w) m.text += ' ';
          m.text += scenario.background_vocab[rng.uniform_below(scenario.background_vocab.size())];
        }
      }
      derive_tags(m);
      all.push_back({std::move(m), -1});
      t += -std::log(1.0 - rng.uniform01()) / scenario.background_rate;
    }
  }

  // Bursts: per full bin, a power-law count of messages clustered around the
  // epicenter.
  for (std::size_t bi = 0; bi < scenario.bursts.size(); ++bi) {
    const auto& b = scenario.bursts[bi];
    Rng rng(derive_seed(scenario.seed, "burst-" + std::to_string(bi)));
    const DiscretePowerLawSampler sampler(b.alpha, b.xmin);
    const auto lexicon = burst_lexicon(b.tag);
    const std::int64_t bins = (b.end - b.start) / b.bin_d;
    std::int64_t seq = 0;
    for (std::int64_t k = 0; k < bins; ++k) {
      const std::int64_t bin_start = b.start + k * b.bin_d;
      const std::int64_t count = sampler.draw(rng);
      for (std::int64_t j = 0; j < count; ++j) {
        GeoMessage m;
        m.id = "b" + std::to_string(bi) + "-" + zero_pad(seq++, 7);
        m.ts = bin_start + rng.uniform_int(0, b.bin_d - 1);
        for (int attempt = 0;; ++attempt) {
          m.lat = b.epicenter_lat + b.spatial_sigma * rng.normal();
          m.lon = b.epicenter_lon + b.spatial_sigma * rng.normal();
          if (scenario.region.contains(m.lat, m.lon)) break;
          if (attempt >= 256) {  // e.g. epicenter hugging the border
            m.lat = std::clamp(m.lat, scenario.region.min_lat, scenario.region.max_lat);
            m.lon = std::clamp(m.lon, scenario.region.min_lon, scenario.region.max_lon);
            break;
          }
        }
        m.text = lexicon[0];
        for (int w = 0; w < 2; ++w) {
          m.text += ' ';
          m.text += lexicon[1 + rng.uniform_below(lexicon.size() - 1)];
        }
        if (rng.uniform01() < b.tag_frac) {
          m.text += " #" + b.tag;
        }
        derive_tags(m);
        all.push_back({std::move(m), static_cast<int>(bi)});
      }
    }
  }

  std::sort(all.begin(), all.end(), [](const LabeledMessage& a, const LabeledMessage& b) {
    if (a.msg.ts != b.msg.ts) return a.msg.ts < b.msg.ts;
    return a.msg.id < b.msg.id;
  });

  LabeledStream out;
  out.messages.reserve(all.size());
  out.labels.reserve(all.size());
  out.bursts = scenario.bursts;
  for (auto& lm : all) {
    out.messages.push_back(std::move(lm.msg));
    out.labels.push_back(lm.label);
  }
  return out;
}

EvalReport evaluate(std::span<const Event> events, const LabeledStream& stream,
                    std::span<const WindowSpan> windows, const EvalParams& params) {
  if (stream.labels.size() != stream.messages.size()) {
    throw ConfigError("evaluate: labels do not align with messages");
  }
  std::unordered_map<std::string_view, int> label_of;
  label_of.reserve(stream.messages.size());
  for (std::size_t i = 0; i < stream.messages.size(); ++i) {
    label_of.emplace(stream.messages[i].id, stream.labels[i]);
  }

  const auto overlaps = [](std::int64_t a0, std::int64_t a1, std::int64_t b0, std::int64_t b1) {
    return a0 < b1 && b0 < a1;
  };

  EvalReport rep;
  rep.n_detected = static_cast<std::int64_t>(events.size());

  // earliest completing window per matched burst
  std::unordered_map<int, std::int64_t> first_done;
  for (const auto& ev : events) {
    std::unordered_map<int, std::int64_t> counts;
    for (const auto& id : ev.message_ids) {
      auto it = label_of.find(id);
      if (it != label_of.end() && it->second >= 0) ++counts[it->second];
    }
    int match = -1;
    for (const auto& [burst, count] : counts) {
      if (static_cast<double>(count) >
          params.label_purity * static_cast<double>(ev.message_ids.size())) {
        match = burst;
        break;  // purity > 1/2 is unique
      }
    }
    if (match < 0) continue;
    const auto& b = stream.bursts[static_cast<std::size_t>(match)];
    if (!overlaps(ev.window_start, ev.window_start + ev.l, b.start, b.end)) continue;
    ++rep.n_true_detections;
    const std::int64_t done = ev.window_start + ev.l;
    auto it = first_done.find(match);
    if (it == first_done.end() || done < it->second) first_done[match] = done;
  }
  rep.n_true = static_cast<std::int64_t>(first_done.size());

  // Detectable scope: bursts emitting at least min_tail messages inside the
  // evaluated windows, plus anything that was actually detected (the
  // pseudo-recall denominator always contains the events some method found).
  std::vector<std::int64_t> in_scope(stream.bursts.size(), 0);
  for (std::size_t i = 0; i < stream.messages.size(); ++i) {
    const int label = stream.labels[i];
    if (label < 0) continue;
    const std::int64_t ts = stream.messages[i].ts;
    for (const auto& w : windows) {
      if (ts >= w.start && ts < w.start + w.l) {
        ++in_scope[static_cast<std::size_t>(label)];
        break;
      }
    }
  }
  for (std::size_t b = 0; b < stream.bursts.size(); ++b) {
    rep.n_total += in_scope[b] >= params.min_tail || first_done.count(static_cast<int>(b)) > 0;
  }

  if (rep.n_detected == 0) {
    rep.precision = 1.0;  // convention: no detections, nothing wrong
    rep.precision_defined = false;
  } else {
    rep.precision =
        static_cast<double>(rep.n_true_detections) / static_cast<double>(rep.n_detected);
  }
  rep.pseudo_recall = rep.n_total == 0
                          ? 1.0
                          : static_cast<double>(rep.n_true) / static_cast<double>(rep.n_total);

  std::vector<std::pair<int, std::int64_t>> lat(first_done.begin(), first_done.end());
  std::sort(lat.begin(), lat.end());
  for (auto& [burst, done] : lat) {
    rep.latencies.emplace_back(burst,
                               done - stream.bursts[static_cast<std::size_t>(burst)].start);
  }
  return rep;
}

}  // namespace geotail
