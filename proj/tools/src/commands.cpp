#include "geotail_cli/commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "geotail/detect.hpp"
#include "geotail/errors.hpp"
#include "geotail/io.hpp"
#include "geotail/powerlaw.hpp"
#include "geotail/selfsim.hpp"
#include "geotail/synth.hpp"
#include "geotail/timeseries.hpp"

namespace geotail::cli {

namespace {

// '-' means stdin/stdout.
struct InputStream {
  std::ifstream file;
  std::istream& get(const std::string& path) {
    if (path == "-") return std::cin;
    file.open(path);
    if (!file) throw ConfigError("cannot open input '" + path + "'");
    return file;
  }
};

struct OutputStream {
  std::ofstream file;
  std::ostream& get(const std::string& path) {
    if (path == "-") return std::cout;
    file.open(path);
    if (!file) throw ConfigError("cannot open output '" + path + "'");
    return file;
  }
};

std::vector<std::int64_t> read_counts(std::istream& in) {
  std::vector<std::int64_t> counts;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      std::size_t pos = 0;
      counts.push_back(std::stoll(line, &pos));
      if (pos != line.size()) throw std::invalid_argument(line);
    } catch (const std::exception&) {
      throw ParseError(lineno, "expected an integer count, got '" + line + "'");
    }
  }
  return counts;
}

CountSeries series_from_messages(const std::vector<GeoMessage>& messages, std::int64_t d) {
  if (messages.empty()) throw EstimationError("empty stream");
  const std::int64_t t0 = messages.front().ts;
  const std::int64_t t1 = messages.back().ts;
  const std::int64_t n_bins = (t1 - t0) / d + 1;
  std::vector<std::int64_t> ts;
  ts.reserve(messages.size());
  for (const auto& m : messages) ts.push_back(m.ts);
  return bin_counts(ts, t0, n_bins * d, static_cast<int>(n_bins));
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) return kExitParse;
  if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
  return kExitData;
}

}  // namespace

bool apply_preset(std::string_view name, DetectorConfig& config) {
  if (name == "melbourne") {
    config.l = 1800;
    config.n_min = 80;
    config.m_s = 15;
  } else if (name == "la") {
    config.l = 1200;
    config.n_min = 150;
    config.m_s = 50;
  } else if (name == "sydney") {
    config.l = 3600;
    config.n_min = 100;
    config.m_s = 50;
  } else {
    return false;
  }
  return true;
}

int cmd_hurst(const HurstOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    InputStream input;
    auto& in = input.get(opts.input);

    std::vector<double> series;
    if (opts.counts_mode) {
      for (auto c : read_counts(in)) series.push_back(static_cast<double>(c));
    } else {
      if (opts.d < 1) throw ConfigError("d must be >= 1 second");
      auto messages = read_message_stream(in);
      std::sort(messages.begin(), messages.end(),
                [](const GeoMessage& a, const GeoMessage& b) { return a.ts < b.ts; });
      series = series_from_messages(messages, opts.d).values();
    }
    if (series.size() < kMinSeriesLen) {
      err << "error: series has " << series.size() << " bins, need at least "
          << kMinSeriesLen << "\n";
      return kExitData;
    }

    std::vector<HurstEstimate> estimates;
    for (const auto& method : opts.methods) {
      HurstEstimate est;
      if (method == "agg_var") {
        est = hurst_agg_var(series);
      } else if (method == "rs") {
        est = hurst_rs(series);
      } else if (method == "whittle") {
        est = hurst_whittle(series);
      } else {
        throw ConfigError("unknown method '" + method + "' (agg_var, rs, whittle)");
      }
      estimates.push_back(est);
      out << "H[" << to_string(est.method) << "] = " << est.h;
      if (est.ci_low) out << "  ci95 = [" << *est.ci_low << ", " << *est.ci_high << "]";
      out << "\n";
    }
    out << "verdict: " << (self_similar_verdict(estimates) ? "self-similar" : "not self-similar")
        << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

int cmd_plfit(const PlfitOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    InputStream input;
    auto counts = read_counts(input.get(opts.input));
    if (counts.empty()) {
      err << "error: no counts in input\n";
      return kExitData;
    }
    auto fit = fit_discrete(counts, opts.min_tail);
    BootstrapDiagnostics diag;
    fit.p_value =
        significance_pvalue(counts, fit, opts.n_boot, opts.min_tail, opts.seed, &diag);
    out << "alpha = " << fit.alpha << "\n";
    out << "xmin = " << fit.xmin << "\n";
    out << "ks = " << fit.ks << "\n";
    out << "n_tail = " << fit.n_tail << "\n";
    out << "p_value = " << *fit.p_value << "\n";
    if (diag.failed_replicas > 0) {
      out << "bootstrap_failed_replicas = " << diag.failed_replicas << "\n";
    }
    out << "verdict: "
        << (*fit.p_value >= 0.05 ? "power-law plausible (p >= 0.05)"
                                 : "power-law rejected (p < 0.05)")
        << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

namespace {

DetectorConfig resolve_config(const DetectOptions& opts) {
  DetectorConfig cfg = opts.config;
  if (opts.preset && !apply_preset(*opts.preset, cfg)) {
    throw ConfigError("unknown preset '" + *opts.preset + "' (melbourne, la, sydney)");
  }
  if (opts.d) {
    const double ratio = static_cast<double>(cfg.l) / *opts.d;
    const double rounded = std::round(ratio);
    if (!(*opts.d > 0.0) || std::abs(ratio - rounded) > 1e-9 || rounded < 1.0) {
      std::ostringstream msg;
      msg << "l = n_min * d violated: l = " << cfg.l << " is not divisible by d = "
          << *opts.d;
      throw ConfigError(msg.str());
    }
    cfg.n_min = static_cast<int>(rounded);
  }
  validate_config(cfg);
  return cfg;
}

}  // namespace

int cmd_detect(const DetectOptions& opts, std::ostream& err) {
  try {
    const DetectorConfig cfg = resolve_config(opts);
    if (!opts.region) throw ConfigError("--region is required");
    const Region region = *opts.region;
    validate_region(region);
    if (opts.mode != "basic" && opts.mode != "advanced") {
      throw ConfigError("mode must be 'basic' or 'advanced'");
    }

    InputStream input;
    auto messages = read_message_stream(input.get(opts.input));
    OutputStream output;
    auto& out = output.get(opts.output);

    EventReportHeader header;
    header.mode = opts.mode;
    header.region = region;
    header.config = cfg;
    if (opts.mode == "advanced") header.adv = opts.adv;
    header.start_ts = opts.start_ts.value_or(messages.empty() ? 0 : messages.front().ts);
    header.end_ts = opts.end_ts.value_or(messages.empty() ? header.start_ts
                                                          : messages.back().ts + 1);
    out << serialize_report_header(header) << '\n';

    std::int64_t n_events = 0;
    StreamStats stats;
    if (opts.mode == "basic") {
      stats = run_stream(
          messages, region, cfg,
          [&](std::int64_t, const std::vector<Event>& events) {
            for (const auto& ev : events) out << serialize_event(ev) << '\n';
          },
          header.start_ts, header.end_ts, opts.threads, opts.disorder_slack);
      n_events = stats.events_emitted;
    } else {
      validate_advanced(opts.adv);
      AdvancedDetector detector(region, cfg, opts.adv);
      SpanVerifyFeed feed(messages, header.end_ts);
      std::size_t cursor = 0;
      while (cursor < messages.size() && messages[cursor].ts < header.start_ts) ++cursor;
      for (std::int64_t ws = header.start_ts; ws + cfg.l <= header.end_ts; ws += cfg.l) {
        std::vector<GeoMessage> batch;
        while (cursor < messages.size() && messages[cursor].ts < ws + cfg.l) {
          if (messages[cursor].ts >= ws) batch.push_back(messages[cursor]);
          ++cursor;
        }
        auto res = detector.push_and_step(make_query_window(ws, cfg.l, std::move(batch)),
                                          feed, opts.threads);
        for (const auto& ev : res.events) out << serialize_event(ev) << '\n';
        n_events += static_cast<std::int64_t>(res.events.size());
        ++stats.windows_processed;
      }
    }
    out << serialize_summary(stats.windows_processed, n_events) << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

int cmd_synth(const SynthOptions& opts, std::ostream& err) {
  try {
    InputStream input;
    auto scenario = parse_scenario(input.get(opts.scenario));

    std::string labels_path = opts.labels;
    if (labels_path.empty()) {
      if (opts.output == "-") {
        throw ConfigError("--labels is required when the stream goes to stdout");
      }
      labels_path = opts.output + ".labels";
    }

    auto stream = generate(scenario);

    OutputStream output;
    auto& out = output.get(opts.output);
    for (const auto& m : stream.messages) out << serialize_message(m) << '\n';

    std::ofstream labels(labels_path);
    if (!labels) throw ConfigError("cannot open labels output '" + labels_path + "'");
    write_labels(labels, stream, scenario);

    std::int64_t burst_msgs = 0;
    for (int l : stream.labels) burst_msgs += l >= 0;
    err << "generated " << stream.messages.size() << " messages (" << burst_msgs
        << " burst, " << scenario.bursts.size() << " bursts) -> " << opts.output
        << ", labels -> " << labels_path << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

int cmd_eval(const EvalOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    InputStream events_in;
    auto report = read_event_report(events_in.get(opts.events));
    InputStream labels_in;
    auto labeled = read_labels(labels_in.get(opts.labels));

    EvalParams params;
    params.label_purity = opts.label_purity;
    params.min_tail = opts.min_tail.value_or(report.header.config.min_tail);
    const auto spans = report.window_spans();
    auto rep = evaluate(report.events, labeled, spans, params);

    std::vector<std::int64_t> lat;
    for (const auto& [burst, latency] : rep.latencies) lat.push_back(latency);
    std::sort(lat.begin(), lat.end());
    const auto pct = [&](double q) -> std::int64_t {
      if (lat.empty()) return 0;
      const std::size_t idx = static_cast<std::size_t>(q * (lat.size() - 1) + 0.5);
      return lat[idx];
    };

    if (opts.json) {
      out << "{\"n_detected\":" << rep.n_detected
          << ",\"n_true_detections\":" << rep.n_true_detections
          << ",\"n_true\":" << rep.n_true << ",\"n_total\":" << rep.n_total
          << ",\"precision\":" << rep.precision
          << ",\"precision_defined\":" << (rep.precision_defined ? "true" : "false")
          << ",\"pseudo_recall\":" << rep.pseudo_recall << ",\"latency_p50\":" << pct(0.5)
          << ",\"latency_p90\":" << pct(0.9) << "}\n";
    } else {
      out << "detected = " << rep.n_detected << " (true " << rep.n_true_detections << ")\n";
      out << "bursts detected = " << rep.n_true << " / " << rep.n_total << "\n";
      out << "precision = " << rep.precision
          << (rep.precision_defined ? "" : " (no detections; by convention)") << "\n";
      out << "pseudo_recall = " << rep.pseudo_recall << "\n";
      out << "latency_p50 = " << pct(0.5) << "s, latency_p90 = " << pct(0.9) << "s\n";
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace geotail::cli
