#include <iostream>
#include <vector>

#include <CLI11.hpp>

#include "geotail_cli/commands.hpp"

using namespace geotail;
using namespace geotail::cli;

int main(int argc, char** argv) {
  CLI::App app{"geotail: power-law event detection in geo-tagged message streams"};
  app.require_subcommand(1);

  // hurst
  HurstOptions hurst_opts;
  auto* hurst = app.add_subcommand("hurst", "Estimate the Hurst parameter of a stream");
  hurst->add_option("input", hurst_opts.input, "message stream (JSONL), '-' for stdin")
      ->required();
  hurst->add_option("--method", hurst_opts.methods,
                    "estimators to run (agg_var, rs, whittle)");
  hurst->add_option("--d", hurst_opts.d, "bin width in seconds (default 60)");
  hurst->add_flag("--counts", hurst_opts.counts_mode, "input is one count per line");

  // plfit
  PlfitOptions plfit_opts;
  auto* plfit = app.add_subcommand("plfit", "Fit a discrete power law and test significance");
  plfit->add_option("input", plfit_opts.input, "counts, one per line; '-' for stdin")
      ->required();
  plfit->add_option("--n-boot", plfit_opts.n_boot, "bootstrap replicas (default 1000)");
  plfit->add_option("--min-tail", plfit_opts.min_tail, "minimum tail size (default 10)");
  plfit->add_option("--seed", plfit_opts.seed, "RNG seed");

  // detect
  DetectOptions detect_opts;
  std::vector<double> region_vals;
  auto* detect = app.add_subcommand("detect", "Detect events in a message stream");
  detect->add_option("--in", detect_opts.input, "message stream (JSONL), '-' for stdin")
      ->required();
  detect->add_option("--out", detect_opts.output, "event report output, '-' for stdout");
  detect->add_option("--mode", detect_opts.mode, "basic | advanced");
  detect->add_option("--preset", detect_opts.preset,
                     "parameter preset: melbourne | la | sydney");
  detect
      ->add_option("--region", region_vals,
                   "detection region: min_lat min_lon max_lat max_lon")
      ->expected(4);
  detect->add_option("--l", detect_opts.config.l, "query window length, seconds");
  detect->add_option("--n-min", detect_opts.config.n_min, "bins per window");
  detect->add_option("--d", detect_opts.d, "bin width in seconds (must divide l)");
  detect->add_option("--m-s", detect_opts.config.m_s, "quad-tree split threshold");
  detect->add_option("--depth", detect_opts.config.depth_max, "quad-tree max depth D");
  detect->add_option("--alpha-reject", detect_opts.config.alpha_reject,
                     "significance level (default 0.05)");
  detect->add_option("--n-boot", detect_opts.config.n_boot, "bootstrap replicas");
  detect->add_option("--min-tail", detect_opts.config.min_tail, "minimum tail size");
  detect->add_option("--seed", detect_opts.config.seed, "RNG seed");
  detect->add_option("--start", detect_opts.start_ts, "first window start (default: first ts)");
  detect->add_option("--end", detect_opts.end_ts, "stream end (default: last ts + 1)");
  detect->add_option("--slack", detect_opts.disorder_slack,
                     "tolerated out-of-order seconds (default 0)");
  detect->add_option("--threads", detect_opts.threads, "bootstrap worker threads");
  detect->add_option("--n-sw", detect_opts.adv.n_sw, "advanced: sliding window count");
  detect->add_option("--verify-len", detect_opts.adv.verify_len,
                     "advanced: verification window seconds");
  detect->add_option("--verify-rounds", detect_opts.adv.verify_rounds,
                     "advanced: verification rounds");
  detect->add_option("--share-frac", detect_opts.adv.share_frac,
                     "advanced: id-share fraction for a match");
  detect->add_option("--top-x", detect_opts.adv.top_x, "advanced: top tags in clean-up");
  detect->add_option("--dim", detect_opts.adv.dim, "advanced: embedding dimension");
  detect->add_option("--branching", detect_opts.adv.birch_branching,
                     "advanced: CF-tree branching factor");
  detect->add_option("--t-step", detect_opts.adv.t_step,
                     "advanced: radius threshold increment");
  detect->add_option("--small-size", detect_opts.adv.small_cluster_size,
                     "advanced: small-cluster cutoff");
  detect->add_option("--small-frac", detect_opts.adv.small_cluster_frac,
                     "advanced: small-cluster mass bound");
  detect->add_option("--dominant-frac", detect_opts.adv.dominant_frac,
                     "advanced: clean-up tagged-share bound");

  // synth
  SynthOptions synth_opts;
  auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic stream");
  synth->add_option("--scenario", synth_opts.scenario, "scenario file, '-' for stdin")
      ->required();
  synth->add_option("--out", synth_opts.output, "stream output, '-' for stdout");
  synth->add_option("--labels", synth_opts.labels,
                    "label sidecar path (default <out>.labels)");

  // eval
  EvalOptions eval_opts;
  auto* eval = app.add_subcommand("eval", "Score an event report against labels");
  eval->add_option("--events", eval_opts.events, "event report, '-' for stdin")->required();
  eval->add_option("--labels", eval_opts.labels, "label sidecar")->required();
  eval->add_option("--purity", eval_opts.label_purity,
                   "label share required for a match (default 0.5)");
  eval->add_option("--min-tail", eval_opts.min_tail,
                   "burst scope threshold (default: report config)");
  eval->add_flag("--json", eval_opts.json, "machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  if (hurst->parsed()) return cmd_hurst(hurst_opts, std::cout, std::cerr);
  if (plfit->parsed()) return cmd_plfit(plfit_opts, std::cout, std::cerr);
  if (detect->parsed()) {
    if (region_vals.size() == 4) {
      detect_opts.region = Region{region_vals[0], region_vals[1], region_vals[2],
                                  region_vals[3]};
    }
    return cmd_detect(detect_opts, std::cerr);
  }
  if (synth->parsed()) return cmd_synth(synth_opts, std::cerr);
  if (eval->parsed()) return cmd_eval(eval_opts, std::cout, std::cerr);
  return kExitConfig;
}
