#include "geotail/io.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "geotail/errors.hpp"

namespace geotail {

using json = nlohmann::ordered_json;

namespace {

json region_to_json(const Region& r) {
  return json::array({r.min_lat, r.min_lon, r.max_lat, r.max_lon});
}

Region region_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) throw ParseError("region must be [min_lat, min_lon, max_lat, max_lon]");
  Region r{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  validate_region(r);
  return r;
}

json parse_json_line(std::string_view line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) throw ParseError("invalid JSON");
  return j;
}

}  // namespace

std::string serialize_message(const GeoMessage& m) {
  json j;
  j["id"] = m.id;
  j["ts"] = m.ts;
  j["lat"] = m.lat;
  j["lon"] = m.lon;
  j["text"] = m.text;
  j["hashtags"] = m.hashtags;
  j["mentions"] = m.mentions;
  return j.dump();
}

GeoMessage parse_message(std::string_view line) {
  const json j = parse_json_line(line);
  if (!j.is_object()) throw ParseError("record is not a JSON object");
  GeoMessage m;
  try {
    m.id = j.at("id").get<std::string>();
    m.ts = j.at("ts").get<std::int64_t>();
    m.lat = j.at("lat").get<double>();
    m.lon = j.at("lon").get<double>();
    m.text = j.value("text", std::string{});
    if (j.contains("hashtags")) m.hashtags = j.at("hashtags").get<std::vector<std::string>>();
    if (j.contains("mentions")) m.mentions = j.at("mentions").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad record: ") + e.what());
  }
  if (m.lat < -90.0 || m.lat > 90.0) throw ParseError("lat outside [-90, 90]");
  if (m.lon < -180.0 || m.lon > 180.0) throw ParseError("lon outside [-180, 180]");
  if (!j.contains("hashtags") && !j.contains("mentions")) derive_tags(m);
  return m;
}

std::vector<GeoMessage> read_message_stream(std::istream& in) {
  std::vector<GeoMessage> out;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(parse_message(line));
    } catch (const ParseError& e) {
      throw ParseError(lineno, e.what());
    }
  }
  return out;
}

namespace {

json config_to_json(const DetectorConfig& c) {
  json j;
  j["l"] = c.l;
  j["n_min"] = c.n_min;
  j["m_s"] = c.m_s;
  j["depth_max"] = c.depth_max;
  j["alpha_reject"] = c.alpha_reject;
  j["n_boot"] = c.n_boot;
  j["min_tail"] = c.min_tail;
  j["seed"] = c.seed;
  return j;
}

DetectorConfig config_from_json(const json& j) {
  DetectorConfig c;
  c.l = j.at("l").get<std::int64_t>();
  c.n_min = j.at("n_min").get<int>();
  c.m_s = j.at("m_s").get<int>();
  c.depth_max = j.at("depth_max").get<int>();
  c.alpha_reject = j.at("alpha_reject").get<double>();
  c.n_boot = j.at("n_boot").get<int>();
  c.min_tail = j.at("min_tail").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

json adv_to_json(const AdvancedConfig& a) {
  json j;
  j["n_sw"] = a.n_sw;
  j["verify_len"] = a.verify_len;
  j["verify_rounds"] = a.verify_rounds;
  j["share_frac"] = a.share_frac;
  j["top_x"] = a.top_x;
  j["dim"] = a.dim;
  j["birch_branching"] = a.birch_branching;
  j["t_step"] = a.t_step;
  j["small_cluster_size"] = a.small_cluster_size;
  j["small_cluster_frac"] = a.small_cluster_frac;
  j["dominant_frac"] = a.dominant_frac;
  return j;
}

AdvancedConfig adv_from_json(const json& j) {
  AdvancedConfig a;
  a.n_sw = j.at("n_sw").get<int>();
  a.verify_len = j.at("verify_len").get<std::int64_t>();
  a.verify_rounds = j.at("verify_rounds").get<int>();
  a.share_frac = j.at("share_frac").get<double>();
  a.top_x = j.at("top_x").get<int>();
  a.dim = j.at("dim").get<int>();
  a.birch_branching = j.at("birch_branching").get<int>();
  a.t_step = j.at("t_step").get<double>();
  a.small_cluster_size = j.at("small_cluster_size").get<int>();
  a.small_cluster_frac = j.at("small_cluster_frac").get<double>();
  a.dominant_frac = j.at("dominant_frac").get<double>();
  return a;
}

}  // namespace

std::string serialize_report_header(const EventReportHeader& h) {
  json j;
  j["type"] = "header";
  j["format"] = "geotail-events";
  j["version"] = kReportVersion;
  j["mode"] = h.mode;
  j["region"] = region_to_json(h.region);
  j["config"] = config_to_json(h.config);
  if (h.adv) j["advanced"] = adv_to_json(*h.adv);
  j["start_ts"] = h.start_ts;
  j["end_ts"] = h.end_ts;
  return j.dump();
}

EventReportHeader parse_report_header(std::string_view line) {
  const json j = parse_json_line(line);
  try {
    if (j.at("type") != "header" || j.at("format") != "geotail-events") {
      throw ParseError("not a geotail-events header");
    }
    if (j.at("version").get<int>() != kReportVersion) {
      throw ParseError("unsupported report version");
    }
    EventReportHeader h;
    h.mode = j.at("mode").get<std::string>();
    h.region = region_from_json(j.at("region"));
    h.config = config_from_json(j.at("config"));
    if (j.contains("advanced")) h.adv = adv_from_json(j.at("advanced"));
    h.start_ts = j.at("start_ts").get<std::int64_t>();
    h.end_ts = j.at("end_ts").get<std::int64_t>();
    return h;
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad header: ") + e.what());
  }
}

std::string serialize_event(const Event& e) {
  json j;
  j["type"] = "event";
  j["node_path"] = e.node_path;
  j["region"] = region_to_json(e.region);
  j["window_start"] = e.window_start;
  j["l"] = e.l;
  j["p_value"] = e.fit.p_value.value_or(-1.0);
  j["alpha"] = e.fit.alpha;
  j["xmin"] = e.fit.xmin;
  j["ks"] = e.fit.ks;
  j["n_tail"] = e.fit.n_tail;
  j["source"] = to_string(e.source);
  j["message_ids"] = e.message_ids;
  json tags = json::array();
  for (const auto& [tag, count] : e.top_tags) tags.push_back(json::array({tag, count}));
  j["top_tags"] = tags;
  json series;
  series["start_ts"] = e.series.start_ts;
  series["span"] = e.series.span;
  series["counts"] = e.series.counts;
  j["series"] = series;
  return j.dump();
}

Event parse_event(std::string_view line) {
  const json j = parse_json_line(line);
  try {
    if (j.at("type") != "event") throw ParseError("not an event line");
    Event e;
    e.node_path = j.at("node_path").get<std::string>();
    e.region = region_from_json(j.at("region"));
    e.window_start = j.at("window_start").get<std::int64_t>();
    e.l = j.at("l").get<std::int64_t>();
    const double p = j.at("p_value").get<double>();
    if (p >= 0.0) e.fit.p_value = p;
    e.fit.alpha = j.at("alpha").get<double>();
    e.fit.xmin = j.at("xmin").get<std::int64_t>();
    e.fit.ks = j.at("ks").get<double>();
    e.fit.n_tail = j.at("n_tail").get<std::int64_t>();
    e.source = j.at("source") == "advanced" ? EventSource::kAdvanced : EventSource::kBasic;
    e.message_ids = j.at("message_ids").get<std::vector<std::string>>();
    for (const auto& t : j.at("top_tags")) {
      e.top_tags.emplace_back(t.at(0).get<std::string>(), t.at(1).get<std::int64_t>());
    }
    const auto& s = j.at("series");
    e.series.start_ts = s.at("start_ts").get<std::int64_t>();
    e.series.span = s.at("span").get<std::int64_t>();
    e.series.counts = s.at("counts").get<std::vector<std::int64_t>>();
    return e;
  } catch (const json::exception& ex) {
    throw ParseError(std::string("bad event: ") + ex.what());
  }
}

std::string serialize_summary(std::int64_t windows, std::int64_t events) {
  json j;
  j["type"] = "summary";
  j["windows"] = windows;
  j["events"] = events;
  return j.dump();
}

std::vector<WindowSpan> EventReport::window_spans() const {
  std::vector<WindowSpan> spans;
  for (std::int64_t ws = header.start_ts; ws + header.config.l <= header.end_ts;
       ws += header.config.l) {
    spans.push_back({ws, header.config.l});
  }
  return spans;
}

EventReport read_event_report(std::istream& in) {
  EventReport report;
  std::string line;
  long lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      if (!have_header) {
        report.header = parse_report_header(line);
        have_header = true;
        continue;
      }
      const json j = parse_json_line(line);
      const std::string type = j.value("type", "");
      if (type == "event") {
        report.events.push_back(parse_event(line));
      } else if (type == "summary") {
        report.windows = j.at("windows").get<std::int64_t>();
      } else {
        throw ParseError("unexpected line type '" + type + "'");
      }
    } catch (const ParseError& e) {
      throw ParseError(lineno, e.what());
    } catch (const json::exception& e) {
      throw ParseError(lineno, e.what());
    }
  }
  if (!have_header) throw ParseError("missing report header");
  return report;
}

namespace {

json burst_to_json(const BurstSpec& b) {
  json j;
  j["epicenter"] = json::array({b.epicenter_lat, b.epicenter_lon});
  j["spatial_sigma"] = b.spatial_sigma;
  j["start"] = b.start;
  j["end"] = b.end;
  j["bin_d"] = b.bin_d;
  j["alpha"] = b.alpha;
  j["xmin"] = b.xmin;
  j["tag"] = b.tag;
  j["tag_frac"] = b.tag_frac;
  return j;
}

BurstSpec burst_from_json(const json& j) {
  BurstSpec b;
  b.epicenter_lat = j.at("epicenter").at(0).get<double>();
  b.epicenter_lon = j.at("epicenter").at(1).get<double>();
  b.spatial_sigma = j.at("spatial_sigma").get<double>();
  b.start = j.at("start").get<std::int64_t>();
  b.end = j.at("end").get<std::int64_t>();
  b.bin_d = j.at("bin_d").get<std::int64_t>();
  b.alpha = j.at("alpha").get<double>();
  b.xmin = j.at("xmin").get<std::int64_t>();
  b.tag = j.at("tag").get<std::string>();
  b.tag_frac = j.at("tag_frac").get<double>();
  return b;
}

}  // namespace

void write_labels(std::ostream& out, const LabeledStream& stream,
                  const SyntheticScenario& scenario) {
  json h;
  h["type"] = "labels-header";
  h["format"] = "geotail-labels";
  h["version"] = kReportVersion;
  h["region"] = region_to_json(scenario.region);
  h["duration"] = scenario.duration;
  json bursts = json::array();
  for (const auto& b : scenario.bursts) bursts.push_back(burst_to_json(b));
  h["bursts"] = bursts;
  out << h.dump() << '\n';
  for (std::size_t i = 0; i < stream.messages.size(); ++i) {
    json j;
    j["id"] = stream.messages[i].id;
    j["ts"] = stream.messages[i].ts;
    j["burst"] = stream.labels[i];
    out << j.dump() << '\n';
  }
}

LabeledStream read_labels(std::istream& in) {
  LabeledStream out;
  std::string line;
  long lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = parse_json_line(line);
      if (!have_header) {
        if (j.value("type", "") != "labels-header" || j.value("format", "") != "geotail-labels") {
          throw ParseError("not a geotail-labels header");
        }
        for (const auto& b : j.at("bursts")) out.bursts.push_back(burst_from_json(b));
        have_header = true;
        continue;
      }
      GeoMessage m;
      m.id = j.at("id").get<std::string>();
      m.ts = j.at("ts").get<std::int64_t>();
      out.messages.push_back(std::move(m));
      out.labels.push_back(j.at("burst").get<int>());
    } catch (const ParseError& e) {
      throw ParseError(lineno, e.what());
    } catch (const json::exception& e) {
      throw ParseError(lineno, e.what());
    }
  }
  if (!have_header) throw ParseError("missing labels header");
  return out;
}

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream iss(s);
  std::string w;
  while (iss >> w) out.push_back(w);
  return out;
}

double to_double(const std::string& s, long lineno) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(lineno, "expected a number, got '" + s + "'");
  }
}

std::int64_t to_int(const std::string& s, long lineno) {
  try {
    std::size_t pos = 0;
    const std::int64_t v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(lineno, "expected an integer, got '" + s + "'");
  }
}

}  // namespace

SyntheticScenario parse_scenario(std::istream& in) {
  SyntheticScenario sc;
  BurstSpec* burst = nullptr;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // trim
    const auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    const auto end = line.find_last_not_of(" \t\r");
    line = line.substr(begin, end - begin + 1);

    if (line == "[burst]") {
      sc.bursts.emplace_back();
      burst = &sc.bursts.back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected key = value");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    const auto kend = key.find_last_not_of(" \t");
    key = kend == std::string::npos ? "" : key.substr(0, kend + 1);
    const auto vbegin = value.find_first_not_of(" \t");
    value = vbegin == std::string::npos ? "" : value.substr(vbegin);

    if (burst == nullptr) {
      if (key == "region") {
        const auto parts = split_ws(value);
        if (parts.size() != 4) throw ParseError(lineno, "region needs 4 numbers");
        sc.region = Region{to_double(parts[0], lineno), to_double(parts[1], lineno),
                           to_double(parts[2], lineno), to_double(parts[3], lineno)};
      } else if (key == "duration") {
        sc.duration = to_int(value, lineno);
      } else if (key == "background_rate") {
        sc.background_rate = to_double(value, lineno);
      } else if (key == "background_vocab") {
        sc.background_vocab = split_ws(value);
      } else if (key == "seed") {
        sc.seed = static_cast<std::uint64_t>(to_int(value, lineno));
      } else {
        throw ParseError(lineno, "unknown scenario key '" + key + "'");
      }
    } else {
      if (key == "epicenter") {
        const auto parts = split_ws(value);
        if (parts.size() != 2) throw ParseError(lineno, "epicenter needs lat lon");
        burst->epicenter_lat = to_double(parts[0], lineno);
        burst->epicenter_lon = to_double(parts[1], lineno);
      } else if (key == "spatial_sigma") {
        burst->spatial_sigma = to_double(value, lineno);
      } else if (key == "start") {
        burst->start = to_int(value, lineno);
      } else if (key == "end") {
        burst->end = to_int(value, lineno);
      } else if (key == "bin_d") {
        burst->bin_d = to_int(value, lineno);
      } else if (key == "alpha") {
        burst->alpha = to_double(value, lineno);
      } else if (key == "xmin") {
        burst->xmin = to_int(value, lineno);
      } else if (key == "tag") {
        burst->tag = value;
      } else if (key == "tag_frac") {
        burst->tag_frac = to_double(value, lineno);
      } else {
        throw ParseError(lineno, "unknown burst key '" + key + "'");
      }
    }
  }
  validate_scenario(sc);
  return sc;
}

std::string serialize_scenario(const SyntheticScenario& sc) {
  std::ostringstream out;
  out << "region = " << sc.region.min_lat << ' ' << sc.region.min_lon << ' ' << sc.region.max_lat
      << ' ' << sc.region.max_lon << '\n';
  out << "duration = " << sc.duration << '\n';
  out << "background_rate = " << sc.background_rate << '\n';
  out << "background_vocab =";
  for (const auto& w : sc.background_vocab) out << ' ' << w;
  out << '\n';
  out << "seed = " << sc.seed << '\n';
  for (const auto& b : sc.bursts) {
    out << "\n[burst]\n";
    out << "epicenter = " << b.epicenter_lat << ' ' << b.epicenter_lon << '\n';
    out << "spatial_sigma = " << b.spatial_sigma << '\n';
    out << "start = " << b.start << '\n';
    out << "end = " << b.end << '\n';
    out << "bin_d = " << b.bin_d << '\n';
    out << "alpha = " << b.alpha << '\n';
    out << "xmin = " << b.xmin << '\n';
    out << "tag = " << b.tag << '\n';
    out << "tag_frac = " << b.tag_frac << '\n';
  }
  return out.str();
}

}  // namespace geotail
