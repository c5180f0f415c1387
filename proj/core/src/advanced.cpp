#include "geotail/advanced.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "geotail/errors.hpp"
#include "geotail/powerlaw.hpp"
#include "geotail/rng.hpp"
#include "geotail/timeseries.hpp"

namespace geotail {

void validate_advanced(const AdvancedConfig& adv) {
  if (adv.n_sw < 1) throw ConfigError("advanced: n_sw must be >= 1");
  if (adv.verify_len < 1) throw ConfigError("advanced: verify_len must be >= 1");
  if (adv.verify_rounds < 0) throw ConfigError("advanced: verify_rounds must be >= 0");
  if (!(adv.share_frac > 0.0 && adv.share_frac < 1.0)) {
    throw ConfigError("advanced: share_frac must be in (0, 1)");
  }
  if (adv.top_x < 1) throw ConfigError("advanced: top_x must be >= 1");
  if (adv.dim < 1) throw ConfigError("advanced: dim must be >= 1");
  if (adv.birch_branching < 2) throw ConfigError("advanced: birch_branching must be >= 2");
  if (!(adv.t_step > 0.0)) throw ConfigError("advanced: t_step must be positive");
  if (adv.small_cluster_size < 1) throw ConfigError("advanced: small_cluster_size must be >= 1");
  if (!(adv.small_cluster_frac > 0.0 && adv.small_cluster_frac < 1.0)) {
    throw ConfigError("advanced: small_cluster_frac must be in (0, 1)");
  }
  if (!(adv.dominant_frac > 0.0 && adv.dominant_frac < 1.0)) {
    throw ConfigError("advanced: dominant_frac must be in (0, 1)");
  }
}

HashingEmbedder::HashingEmbedder(int dim) : dim_(dim) {
  if (dim < 1) throw ConfigError("embedder: dim must be >= 1");
}

std::vector<double> HashingEmbedder::embed(const GeoMessage& message, EmbedMode mode) const {
  const auto tok = tokenize(message.text);
  std::vector<const std::string*> words;
  if (mode == EmbedMode::kKeywords) {
    for (const auto& t : message.hashtags) words.push_back(&t);
    for (const auto& t : message.mentions) words.push_back(&t);
    for (const auto& t : tok.tokens) {
      if (t.size() > 3) words.push_back(&t);
    }
  } else {
    for (const auto& t : tok.tokens) words.push_back(&t);
    for (const auto& t : message.mentions) words.push_back(&t);
  }

  std::vector<double> v(static_cast<std::size_t>(dim_), 0.0);
  for (const auto* w : words) {
    const std::uint64_t h = fnv1a64(*w);
    const std::size_t bucket = static_cast<std::size_t>(h % static_cast<std::uint64_t>(dim_));
    const double sign = (splitmix64(h) & 1u) ? 1.0 : -1.0;
    v[bucket] += sign;
  }
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  if (norm2 > 0.0) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : v) x *= inv;
  }
  return v;
}

void ClusterFeature::add(std::span<const double> point) {
  if (linear_sum.empty()) linear_sum.assign(point.size(), 0.0);
  ++n;
  for (std::size_t i = 0; i < point.size(); ++i) {
    linear_sum[i] += point[i];
    square_sum += point[i] * point[i];
  }
}

void ClusterFeature::merge(const ClusterFeature& other) {
  if (linear_sum.empty()) linear_sum.assign(other.linear_sum.size(), 0.0);
  n += other.n;
  for (std::size_t i = 0; i < linear_sum.size(); ++i) linear_sum[i] += other.linear_sum[i];
  square_sum += other.square_sum;
}

std::vector<double> ClusterFeature::centroid() const {
  std::vector<double> c(linear_sum.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = linear_sum[i] / static_cast<double>(n);
  return c;
}

double ClusterFeature::radius() const {
  double c2 = 0.0;
  for (double x : linear_sum) c2 += x * x;
  const double nn = static_cast<double>(n);
  const double r2 = square_sum / nn - c2 / (nn * nn);
  return std::sqrt(std::max(0.0, r2));
}

double ClusterFeature::radius_with(std::span<const double> point) const {
  const double nn = static_cast<double>(n + 1);
  double c2 = 0.0, p2 = 0.0;
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double ls = (linear_sum.empty() ? 0.0 : linear_sum[i]) + point[i];
    c2 += ls * ls;
    p2 += point[i] * point[i];
  }
  const double r2 = (square_sum + p2) / nn - c2 / (nn * nn);
  return std::sqrt(std::max(0.0, r2));
}

namespace {

// Squared distance from a point to a CF centroid, allocation-free.
double dist2_to_cf(const ClusterFeature& cf, std::span<const double> p) {
  const double nn = static_cast<double>(cf.n);
  double d2 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double diff = p[i] - cf.linear_sum[i] / nn;
    d2 += diff * diff;
  }
  return d2;
}

double dist2_cf_cf(const ClusterFeature& a, const ClusterFeature& b) {
  const double na = static_cast<double>(a.n), nb = static_cast<double>(b.n);
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.linear_sum.size(); ++i) {
    const double diff = a.linear_sum[i] / na - b.linear_sum[i] / nb;
    d2 += diff * diff;
  }
  return d2;
}

struct Subcluster {
  ClusterFeature cf;
  std::vector<int> members;
};

struct CfNode {
  bool leaf = true;
  std::vector<Subcluster> subs;                   // leaf payload
  std::vector<ClusterFeature> child_cfs;          // branch payload
  std::vector<std::unique_ptr<CfNode>> children;  // branch payload
};

ClusterFeature cf_of(const CfNode& node) {
  ClusterFeature cf;
  if (node.leaf) {
    for (const auto& s : node.subs) cf.merge(s.cf);
  } else {
    for (const auto& c : node.child_cfs) cf.merge(c);
  }
  return cf;
}

class CfTree {
 public:
  CfTree(double threshold, int branching) : threshold_(threshold), branching_(branching) {}

  void insert(std::span<const double> p, int index) {
    if (!root_) {
      root_ = std::make_unique<CfNode>();
      root_->subs.push_back(make_sub(p, index));
      return;
    }
    auto sibling = insert_rec(*root_, p, index);
    if (sibling) {
      auto new_root = std::make_unique<CfNode>();
      new_root->leaf = false;
      new_root->child_cfs.push_back(cf_of(*root_));
      new_root->child_cfs.push_back(cf_of(*sibling));
      new_root->children.push_back(std::move(root_));
      new_root->children.push_back(std::move(sibling));
      root_ = std::move(new_root);
    }
  }

  std::vector<std::vector<int>> collect() const {
    std::vector<std::vector<int>> out;
    if (root_) collect_rec(*root_, out);
    return out;
  }

 private:
  static Subcluster make_sub(std::span<const double> p, int index) {
    Subcluster s;
    s.cf.add(p);
    s.members.push_back(index);
    return s;
  }

  // Farthest-pair split; the node keeps the first seed's group, the returned
  // sibling takes the second's. Ties resolve to the lowest indices.
  template <typename GetCf, typename MoveEntry>
  std::unique_ptr<CfNode> split_generic(std::size_t count, GetCf get_cf,
                                        MoveEntry move_entry, bool leaf) {
    std::size_t seed_a = 0, seed_b = 1;
    double best = -1.0;
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t j = i + 1; j < count; ++j) {
        const double d = dist2_cf_cf(get_cf(i), get_cf(j));
        if (d > best) {
          best = d;
          seed_a = i;
          seed_b = j;
        }
      }
    }
    auto sibling = std::make_unique<CfNode>();
    sibling->leaf = leaf;
    std::vector<bool> to_b(count, false);
    for (std::size_t i = 0; i < count; ++i) {
      if (i == seed_a) continue;
      if (i == seed_b) {
        to_b[i] = true;
        continue;
      }
      const double da = dist2_cf_cf(get_cf(i), get_cf(seed_a));
      const double db = dist2_cf_cf(get_cf(i), get_cf(seed_b));
      to_b[i] = db < da;
    }
    move_entry(to_b, *sibling);
    return sibling;
  }

  std::unique_ptr<CfNode> split_leaf(CfNode& node) {
    return split_generic(
        node.subs.size(), [&](std::size_t i) -> const ClusterFeature& { return node.subs[i].cf; },
        [&](const std::vector<bool>& to_b, CfNode& sibling) {
          std::vector<Subcluster> keep;
          for (std::size_t i = 0; i < node.subs.size(); ++i) {
            if (to_b[i]) {
              sibling.subs.push_back(std::move(node.subs[i]));
            } else {
              keep.push_back(std::move(node.subs[i]));
            }
          }
          node.subs = std::move(keep);
        },
        /*leaf=*/true);
  }

  std::unique_ptr<CfNode> split_branch(CfNode& node) {
    return split_generic(
        node.children.size(),
        [&](std::size_t i) -> const ClusterFeature& { return node.child_cfs[i]; },
        [&](const std::vector<bool>& to_b, CfNode& sibling) {
          std::vector<ClusterFeature> keep_cfs;
          std::vector<std::unique_ptr<CfNode>> keep_children;
          for (std::size_t i = 0; i < node.children.size(); ++i) {
            if (to_b[i]) {
              sibling.child_cfs.push_back(std::move(node.child_cfs[i]));
              sibling.children.push_back(std::move(node.children[i]));
            } else {
              keep_cfs.push_back(std::move(node.child_cfs[i]));
              keep_children.push_back(std::move(node.children[i]));
            }
          }
          node.child_cfs = std::move(keep_cfs);
          node.children = std::move(keep_children);
        },
        /*leaf=*/false);
  }

  std::unique_ptr<CfNode> insert_rec(CfNode& node, std::span<const double> p, int index) {
    if (node.leaf) {
      int best = -1;
      double best_d = 0.0;
      for (std::size_t i = 0; i < node.subs.size(); ++i) {
        const double d = dist2_to_cf(node.subs[i].cf, p);
        if (best < 0 || d < best_d) {
          best = static_cast<int>(i);
          best_d = d;
        }
      }
      if (best >= 0 && node.subs[static_cast<std::size_t>(best)].cf.radius_with(p) <= threshold_) {
        auto& sub = node.subs[static_cast<std::size_t>(best)];
        sub.cf.add(p);
        sub.members.push_back(index);
        return nullptr;
      }
      node.subs.push_back(make_sub(p, index));
      if (static_cast<int>(node.subs.size()) > branching_) return split_leaf(node);
      return nullptr;
    }

    std::size_t best = 0;
    double best_d = dist2_to_cf(node.child_cfs[0], p);
    for (std::size_t i = 1; i < node.children.size(); ++i) {
      const double d = dist2_to_cf(node.child_cfs[i], p);
      if (d < best_d) {
        best = i;
        best_d = d;
      }
    }
    auto sibling = insert_rec(*node.children[best], p, index);
    if (!sibling) {
      node.child_cfs[best].add(p);
      return nullptr;
    }
    node.child_cfs[best] = cf_of(*node.children[best]);
    node.child_cfs.insert(node.child_cfs.begin() + static_cast<std::ptrdiff_t>(best) + 1,
                          cf_of(*sibling));
    node.children.insert(node.children.begin() + static_cast<std::ptrdiff_t>(best) + 1,
                         std::move(sibling));
    if (static_cast<int>(node.children.size()) > branching_) return split_branch(node);
    return nullptr;
  }

  static void collect_rec(const CfNode& node, std::vector<std::vector<int>>& out) {
    if (node.leaf) {
      for (const auto& s : node.subs) out.push_back(s.members);
    } else {
      for (const auto& c : node.children) collect_rec(*c, out);
    }
  }

  double threshold_;
  int branching_;
  std::unique_ptr<CfNode> root_;
};

}  // namespace

std::vector<std::vector<int>> birch_cluster(std::span<const std::vector<double>> points,
                                            double threshold, int branching) {
  if (threshold < 0.0) throw ConfigError("birch: threshold must be >= 0");
  if (branching < 2) throw ConfigError("birch: branching must be >= 2");
  CfTree tree(threshold, branching);
  for (std::size_t i = 0; i < points.size(); ++i) {
    tree.insert(points[i], static_cast<int>(i));
  }
  return tree.collect();
}

ThresholdSelection select_threshold(std::span<const std::vector<double>> points,
                                    const AdvancedConfig& adv) {
  if (points.empty()) throw ConfigError("select_threshold: no points");
  constexpr double kMaxThreshold = 2.0;  // unit vectors are at most this far apart
  const double total = static_cast<double>(points.size());
  for (double t = adv.t_step;; t += adv.t_step) {
    if (t > kMaxThreshold) t = kMaxThreshold;
    ThresholdSelection sel{t, birch_cluster(points, t, adv.birch_branching)};
    std::size_t in_small = 0, largest = 0;
    for (const auto& c : sel.clusters) {
      if (static_cast<int>(c.size()) < adv.small_cluster_size) in_small += c.size();
      largest = std::max(largest, c.size());
    }
    const bool few_small = static_cast<double>(in_small) < adv.small_cluster_frac * total;
    const bool dominant = static_cast<double>(largest) > 0.5 * total;
    if (few_small || dominant || t >= kMaxThreshold) return sel;
  }
}

std::optional<std::vector<GeoMessage>> SpanVerifyFeed::pull(std::int64_t start,
                                                            std::int64_t len) {
  if (start + len > end_ts_) return std::nullopt;
  std::vector<GeoMessage> out;
  for (const auto& m : messages_) {
    if (m.ts >= start && m.ts < start + len) out.push_back(m);
  }
  return out;
}

namespace {

std::vector<GeoMessage> pooled_messages(std::span<const QueryWindow> buffer) {
  std::vector<GeoMessage> pool;
  for (const auto& w : buffer) {
    pool.insert(pool.end(), w.messages.begin(), w.messages.end());
  }
  std::sort(pool.begin(), pool.end(), [](const GeoMessage& a, const GeoMessage& b) {
    if (a.ts != b.ts) return a.ts < b.ts;
    return a.id < b.id;
  });
  return pool;
}

std::unordered_set<std::string> id_set_of(const std::vector<std::string>& ids) {
  return {ids.begin(), ids.end()};
}

bool sets_match(const std::unordered_set<std::string>& a,
                const std::unordered_set<std::string>& b, double share_frac) {
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  std::size_t shared = 0;
  for (const auto& id : small) shared += large.count(id);
  return static_cast<double>(shared) >
         share_frac * static_cast<double>(std::min(a.size(), b.size()));
}

}  // namespace

AdvancedStepResult detect_advanced_step(std::span<const QueryWindow> buffer,
                                        VerifyFeed& verify_feed, const Region& region,
                                        const DetectorConfig& config,
                                        const AdvancedConfig& adv, const Embedder* embedder,
                                        int n_threads) {
  validate_config(config);
  validate_region(region);
  validate_advanced(adv);
  if (buffer.empty()) throw ConfigError("advanced step: buffer holds no window");
  for (const auto& w : buffer) {
    if (w.l != config.l) throw ConfigError("advanced step: buffered window length != config.l");
  }

  const std::int64_t span_start = buffer.front().start_ts;
  const std::int64_t span_end = buffer.back().start_ts + buffer.back().l;
  const std::int64_t span = span_end - span_start;
  if (span <= 0 || span % config.l != 0) {
    throw ConfigError("advanced step: buffered windows must tile a multiple of l");
  }

  HashingEmbedder fallback(adv.dim);
  const Embedder& emb = embedder ? *embedder : fallback;

  AdvancedStepResult res;
  const auto pool = pooled_messages(buffer);
  if (pool.empty()) return res;

  // 1. keyword embeddings + adaptive-threshold clustering.
  std::vector<std::vector<double>> kw_embs;
  kw_embs.reserve(pool.size());
  for (const auto& m : pool) kw_embs.push_back(emb.embed(m, EmbedMode::kKeywords));
  const auto sel = select_threshold(kw_embs, adv);

  // 2. per-cluster multi-scale power-law detection.
  DetectorConfig pool_cfg = config;
  pool_cfg.l = span;
  pool_cfg.n_min = config.n_min * static_cast<int>(span / config.l);

  struct Candidate {
    Event event;
    std::unordered_set<std::string> ids;
  };
  std::vector<Candidate> candidates;
  for (std::size_t ci = 0; ci < sel.clusters.size(); ++ci) {
    const auto& cluster = sel.clusters[ci];
    if (static_cast<int>(cluster.size()) < config.min_tail) continue;
    std::vector<GeoMessage> msgs;
    msgs.reserve(cluster.size());
    for (int idx : cluster) msgs.push_back(pool[static_cast<std::size_t>(idx)]);
    QueryWindow cw{span_start, span, std::move(msgs)};
    auto events = detail::detect_window_impl(cw, region, pool_cfg, EventSource::kAdvanced,
                                             "adv-c" + std::to_string(ci), n_threads);
    for (auto& ev : events) {
      auto ids = id_set_of(ev.message_ids);
      candidates.push_back(Candidate{std::move(ev), std::move(ids)});
    }
  }
  res.candidates_initial = static_cast<int>(candidates.size());
  if (candidates.empty()) return res;  // verification skipped

  // 3. verification rounds over successive disjoint follow-up windows; the
  // buffered messages are re-embedded from raw text together with the fresh
  // ones, so verified clusters can share ids with the candidates.
  for (int round = 0; round < adv.verify_rounds && !candidates.empty(); ++round) {
    const std::int64_t v_start = span_end + static_cast<std::int64_t>(round) * adv.verify_len;
    auto pulled = verify_feed.pull(v_start, adv.verify_len);
    if (!pulled) {
      res.verify_exhausted = true;
      candidates.clear();
      break;
    }
    ++res.rounds_run;

    std::vector<GeoMessage> vpool = pool;
    vpool.insert(vpool.end(), pulled->begin(), pulled->end());
    std::sort(vpool.begin(), vpool.end(), [](const GeoMessage& a, const GeoMessage& b) {
      if (a.ts != b.ts) return a.ts < b.ts;
      return a.id < b.id;
    });

    std::vector<std::vector<double>> text_embs;
    text_embs.reserve(vpool.size());
    for (const auto& m : vpool) text_embs.push_back(emb.embed(m, EmbedMode::kText));
    const auto vsel = select_threshold(text_embs, adv);

    // The power-law check re-validates each verified cluster's count series
    // over the buffer span at the detector's bin width d; the fresh messages
    // beyond span_end participate in the clustering and the id matching only.
    std::vector<std::unordered_set<std::string>> verified;
    for (std::size_t cj = 0; cj < vsel.clusters.size(); ++cj) {
      const auto& vc = vsel.clusters[cj];
      if (static_cast<int>(vc.size()) < config.min_tail) continue;
      std::vector<std::int64_t> ts;
      ts.reserve(vc.size());
      for (int idx : vc) {
        const auto& m = vpool[static_cast<std::size_t>(idx)];
        if (m.ts < span_end) ts.push_back(m.ts);
      }
      if (static_cast<int>(ts.size()) < config.min_tail) continue;
      auto series = bin_counts(ts, span_start, span, pool_cfg.n_min);
      DetectorConfig vcfg = config;
      vcfg.seed = derive_seed(config.seed,
                              "adv-v" + std::to_string(round) + "-" + std::to_string(cj));
      auto decision = passes_powerlaw(series.counts, vcfg, n_threads);
      if (!decision.passed) continue;
      std::unordered_set<std::string> ids;
      for (int idx : vc) ids.insert(vpool[static_cast<std::size_t>(idx)].id);
      verified.push_back(std::move(ids));
    }

    std::erase_if(candidates, [&](const Candidate& c) {
      for (const auto& v : verified) {
        if (sets_match(c.ids, v, adv.share_frac)) return false;
      }
      return true;
    });
  }

  res.candidates_verified = static_cast<int>(candidates.size());

  // 4. hashtag/mention clean-up.
  std::unordered_map<std::string_view, const GeoMessage*> by_id;
  by_id.reserve(pool.size());
  for (const auto& m : pool) by_id.emplace(m.id, &m);
  for (auto& c : candidates) {
    std::vector<GeoMessage> msgs;
    msgs.reserve(c.event.message_ids.size());
    for (const auto& id : c.event.message_ids) msgs.push_back(*by_id.at(id));
    const auto tags = top_tags_of(msgs, adv.top_x);
    std::unordered_set<std::string_view> tag_set;
    for (const auto& [tag, count] : tags) tag_set.insert(tag);
    std::size_t tagged = 0;
    for (const auto& m : msgs) {
      bool hit = false;
      for (const auto& t : m.hashtags) {
        if (tag_set.count(t)) {
          hit = true;
          break;
        }
      }
      if (!hit) {
        for (const auto& t : m.mentions) {
          if (tag_set.count(t)) {
            hit = true;
            break;
          }
        }
      }
      tagged += hit;
    }
    if (static_cast<double>(tagged) >
        adv.dominant_frac * static_cast<double>(msgs.size())) {
      res.events.push_back(std::move(c.event));
    }
  }
  return res;
}

AdvancedDetector::AdvancedDetector(Region region, DetectorConfig config, AdvancedConfig adv,
                                   std::shared_ptr<const Embedder> embedder)
    : region_(region), config_(config), adv_(adv), embedder_(std::move(embedder)) {
  validate_region(region_);
  validate_config(config_);
  validate_advanced(adv_);
}

AdvancedStepResult AdvancedDetector::push_and_step(QueryWindow window, VerifyFeed& verify_feed,
                                                   int n_threads) {
  if (window.l != config_.l) throw ConfigError("advanced: window length != config.l");
  buffer_.push_back(std::move(window));
  while (static_cast<int>(buffer_.size()) > adv_.n_sw) buffer_.pop_front();
  std::vector<QueryWindow> view(buffer_.begin(), buffer_.end());
  return detect_advanced_step(view, verify_feed, region_, config_, adv_,
                              embedder_ ? embedder_.get() : nullptr, n_threads);
}

}  // namespace geotail
