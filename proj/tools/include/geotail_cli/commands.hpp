#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "geotail/advanced.hpp"
#include "geotail/types.hpp"

namespace geotail::cli {

// Exit-code contract, stable across subcommands:
//   0 ok; 1 invalid configuration/usage; 2 parse failure (reported with a
//   line number); 3 insufficient or unusable data.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitData = 3;

struct HurstOptions {
  std::string input;  // message stream path, or '-' for stdin
  std::vector<std::string> methods = {"agg_var", "rs", "whittle"};
  std::int64_t d = 60;       // bin width when reading a message stream
  bool counts_mode = false;  // input is one integer count per line
};

struct PlfitOptions {
  std::string input;  // counts, one integer per line; '-' for stdin
  int n_boot = 1000;  // offline verification default
  int min_tail = 10;
  std::uint64_t seed = 0;
};

struct DetectOptions {
  std::string input;
  std::string output = "-";
  std::string mode = "basic";
  std::optional<std::string> preset;  // melbourne | la | sydney
  std::optional<Region> region;
  DetectorConfig config;
  std::optional<double> d;  // alternative to n_min; must divide l
  AdvancedConfig adv;
  std::optional<std::int64_t> start_ts;
  std::optional<std::int64_t> end_ts;
  std::int64_t disorder_slack = 0;
  int threads = 1;
};

struct SynthOptions {
  std::string scenario;
  std::string output = "-";
  std::string labels;  // defaults to <output>.labels; required when output is '-'
};

struct EvalOptions {
  std::string events;
  std::string labels;
  double label_purity = 0.5;
  std::optional<int> min_tail;  // defaults to the report's config
  bool json = false;
};

int cmd_hurst(const HurstOptions& opts, std::ostream& out, std::ostream& err);
int cmd_plfit(const PlfitOptions& opts, std::ostream& out, std::ostream& err);
int cmd_detect(const DetectOptions& opts, std::ostream& err);
int cmd_synth(const SynthOptions& opts, std::ostream& err);
int cmd_eval(const EvalOptions& opts, std::ostream& out, std::ostream& err);

/// The paper-documented parameter triples (l, n_min, m_s).
bool apply_preset(std::string_view name, DetectorConfig& config);

}  // namespace geotail::cli
