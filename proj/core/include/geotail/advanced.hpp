#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "geotail/detect.hpp"
#include "geotail/types.hpp"

namespace geotail {

/// Parameters of the semantic-clustering-enhanced detector.
struct AdvancedConfig {
  int n_sw = 6;                    // sliding-window count
  std::int64_t verify_len = 300;   // verification window, seconds
  int verify_rounds = 3;
  double share_frac = 0.5;         // matching: shared ids > share_frac * min(sizes)
  int top_x = 10;                  // hashtags/mentions checked in clean-up
  int dim = 64;                    // embedding dimension
  int birch_branching = 50;        // CF-tree node capacity
  double t_step = 0.05;            // radius-threshold increment
  int small_cluster_size = 10;     // "small cluster" cutoff
  double small_cluster_frac = 0.05;
  double dominant_frac = 0.5;      // clean-up: tagged share must exceed this
};

void validate_advanced(const AdvancedConfig& adv);

enum class EmbedMode {
  kKeywords,  // hashtags + mentions + tokens longer than 3 chars
  kText,      // every token
};

/// Message-to-vector interface. Implementations must be deterministic and
/// immutable while a detection step is running; a trained word-vector model
/// can be swapped in without touching any caller.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual int dim() const = 0;
  /// Unit-norm vector (zero vector for an empty token set).
  virtual std::vector<double> embed(const GeoMessage& message, EmbedMode mode) const = 0;
};

/// Default embedder: tokens are feature-hashed into dim buckets with +-1
/// signs from a second hash, summed and normalized. No model artifact, fully
/// reproducible.
class HashingEmbedder : public Embedder {
 public:
  explicit HashingEmbedder(int dim = AdvancedConfig{}.dim);
  int dim() const override { return dim_; }
  std::vector<double> embed(const GeoMessage& message, EmbedMode mode) const override;

 private:
  int dim_;
};

/// BIRCH clustering feature: additive (count, linear sum, square sum) summary
/// of a subcluster.
struct ClusterFeature {
  std::int64_t n = 0;
  std::vector<double> linear_sum;
  double square_sum = 0.0;

  void add(std::span<const double> point);
  void merge(const ClusterFeature& other);
  std::vector<double> centroid() const;
  /// sqrt(max(0, SS/n - |LS/n|^2)).
  double radius() const;
  /// Radius the subcluster would have after absorbing the point.
  double radius_with(std::span<const double> point) const;
};

/// Single-pass CF-tree clustering: each point joins the nearest leaf
/// subcluster (centroid distance) when the merged radius stays within
/// threshold, otherwise starts a new subcluster; nodes split at branching.
/// Returns leaf subclusters as member-index lists, deterministic in input
/// order.
std::vector<std::vector<int>> birch_cluster(
    std::span<const std::vector<double>> points, double threshold, int branching);

struct ThresholdSelection {
  double threshold = 0.0;
  std::vector<std::vector<int>> clusters;
};

/// Grows the radius threshold from t_step in t_step increments until less
/// than small_cluster_frac of the items sit in small clusters, or the largest
/// cluster holds over half of the items, whichever happens first; hard cap at
/// threshold 2 (the diameter of the unit ball).
ThresholdSelection select_threshold(std::span<const std::vector<double>> points,
                                    const AdvancedConfig& adv);

/// Supplies verification messages. pull returns the messages with ts in
/// [start, start + len), or nullopt when the source cannot cover that span.
class VerifyFeed {
 public:
  virtual ~VerifyFeed() = default;
  virtual std::optional<std::vector<GeoMessage>> pull(std::int64_t start, std::int64_t len) = 0;
};

/// Feed over an in-memory stream that ends at end_ts.
class SpanVerifyFeed : public VerifyFeed {
 public:
  SpanVerifyFeed(std::span<const GeoMessage> messages, std::int64_t end_ts)
      : messages_(messages), end_ts_(end_ts) {}
  std::optional<std::vector<GeoMessage>> pull(std::int64_t start, std::int64_t len) override;

 private:
  std::span<const GeoMessage> messages_;
  std::int64_t end_ts_;
};

struct AdvancedStepResult {
  std::vector<Event> events;
  int candidates_initial = 0;   // per-node candidates before verification
  int candidates_verified = 0;  // still alive after the verification rounds
  int rounds_run = 0;
  bool verify_exhausted = false;  // a round could not be fed; fails closed
};

/// One detection step over the buffered sliding windows:
///  1. embed all buffered messages (keywords mode), cluster with the adaptive
///     radius threshold;
///  2. run the per-node power-law detection over a quad-tree of each
///     cluster's messages, collecting candidates;
///  3. verify_rounds times, pull the next verify_len seconds, re-embed the
///     buffered + fresh messages in text mode, re-cluster, keep candidates
///     sharing enough message ids with a power-law-passing verified cluster;
///  4. clean-up: a candidate survives only if more than dominant_frac of its
///     messages carry one of its top_x hashtags/mentions.
AdvancedStepResult detect_advanced_step(std::span<const QueryWindow> buffer,
                                        VerifyFeed& verify_feed, const Region& region,
                                        const DetectorConfig& config,
                                        const AdvancedConfig& adv,
                                        const Embedder* embedder = nullptr,
                                        int n_threads = 1);

/// Stateful driver: keeps the latest n_sw windows, runs a step after each
/// push, then slides by one window.
class AdvancedDetector {
 public:
  AdvancedDetector(Region region, DetectorConfig config, AdvancedConfig adv,
                   std::shared_ptr<const Embedder> embedder = nullptr);

  AdvancedStepResult push_and_step(QueryWindow window, VerifyFeed& verify_feed,
                                   int n_threads = 1);
  const std::deque<QueryWindow>& buffer() const { return buffer_; }

 private:
  Region region_;
  DetectorConfig config_;
  AdvancedConfig adv_;
  std::shared_ptr<const Embedder> embedder_;
  std::deque<QueryWindow> buffer_;
};

}  // namespace geotail
