#include "geotail/types.hpp"

#include <algorithm>
#include <cctype>

#include "geotail/errors.hpp"

namespace geotail {

void validate_region(const Region& r) {
  if (!(r.min_lat < r.max_lat)) throw ConfigError("region: min_lat must be < max_lat");
  if (!(r.min_lon < r.max_lon)) throw ConfigError("region: min_lon must be < max_lon");
  if (r.min_lat < -90.0 || r.max_lat > 90.0) throw ConfigError("region: lat outside [-90, 90]");
  if (r.min_lon < -180.0 || r.max_lon > 180.0) throw ConfigError("region: lon outside [-180, 180]");
}

QueryWindow make_query_window(std::int64_t start_ts, std::int64_t l,
                              std::vector<GeoMessage> messages) {
  if (l <= 0) throw ConfigError("query window: l must be positive");
  for (const auto& m : messages) {
    if (m.ts < start_ts || m.ts >= start_ts + l) {
      throw ConfigError("query window: message '" + m.id + "' outside [start, start+l)");
    }
  }
  std::sort(messages.begin(), messages.end(), [](const GeoMessage& a, const GeoMessage& b) {
    if (a.ts != b.ts) return a.ts < b.ts;
    return a.id < b.id;
  });
  return QueryWindow{start_ts, l, std::move(messages)};
}

void validate_config(const DetectorConfig& cfg) {
  if (cfg.l <= 0) throw ConfigError("config: l must be positive");
  if (cfg.n_min <= 0) throw ConfigError("config: n_min must be positive");
  if (cfg.m_s <= 0) throw ConfigError("config: m_s must be positive");
  if (cfg.depth_max < 0) throw ConfigError("config: D must be >= 0");
  if (!(cfg.alpha_reject > 0.0 && cfg.alpha_reject < 1.0)) {
    throw ConfigError("config: alpha_reject must be in (0, 1)");
  }
  if (cfg.n_boot <= 0) throw ConfigError("config: n_boot must be positive");
  if (cfg.min_tail < 2) throw ConfigError("config: min_tail must be >= 2");
}

namespace {

bool word_char(unsigned char c) {
  return std::isalnum(c) != 0 || c >= 0x80;
}

}  // namespace

TokenizedText tokenize(std::string_view text) {
  TokenizedText out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    char prefix = 0;
    if ((c == '#' || c == '@') && i + 1 < n &&
        word_char(static_cast<unsigned char>(text[i + 1]))) {
      prefix = static_cast<char>(c);
      ++i;
    } else if (!word_char(c)) {
      ++i;
      continue;
    }
    std::string word;
    while (i < n && word_char(static_cast<unsigned char>(text[i]))) {
      word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[i]))));
      ++i;
    }
    if (word.empty()) continue;
    if (prefix == '#') {
      out.hashtags.push_back(word);
      out.tokens.push_back(std::move(word));  // hashtags read as prose too
    } else if (prefix == '@') {
      out.mentions.push_back(std::move(word));  // handles are not prose
    } else {
      out.tokens.push_back(std::move(word));
    }
  }
  return out;
}

void derive_tags(GeoMessage& msg) {
  if (!msg.hashtags.empty() || !msg.mentions.empty()) return;
  auto t = tokenize(msg.text);
  msg.hashtags = std::move(t.hashtags);
  msg.mentions = std::move(t.mentions);
}

}  // namespace geotail
