#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "geotail/errors.hpp"
#include "geotail/quadtree.hpp"
#include "geotail/rng.hpp"

using namespace geotail;

namespace {

const Region kUnit{0.0, 0.0, 1.0, 1.0};

GeoMessage msg(std::string id, double lat, double lon, std::int64_t ts = 0) {
  GeoMessage m;
  m.id = std::move(id);
  m.ts = ts;
  m.lat = lat;
  m.lon = lon;
  return m;
}

std::map<std::string, std::multiset<std::string>> leaf_map(const QuadNode& root) {
  std::map<std::string, std::multiset<std::string>> out;
  preorder(root, [&](const QuadNode& n) {
    if (n.is_leaf() && !n.messages.empty()) {
      auto& ids = out[n.path];
      for (const auto& m : n.messages) ids.insert(m.id);
    }
  });
  return out;
}

}  // namespace

TEST_CASE("point_quadrant midline conventions") {
  CHECK(point_quadrant(kUnit, 0.5, 0.5) == 3);  // center goes NE
  CHECK(point_quadrant(kUnit, 0.0, 0.0) == 0);  // SW corner stays SW
  CHECK(point_quadrant(kUnit, 0.5, 0.25) == 2); // lat on midline, lon west -> NW
  CHECK_THROWS_AS(point_quadrant(kUnit, 2.0, 0.5), ConfigError);
}

TEST_CASE("single insert stays in the root leaf") {
  QuadTree tree(kUnit, 4, 8);
  tree.insert(msg("a", 0.3, 0.3));
  CHECK(tree.root().is_leaf());
  CHECK(tree.root().messages.size() == 1);
}

TEST_CASE("reaching m_s splits and redistributes") {
  QuadTree tree(kUnit, 4, 8);
  tree.insert(msg("sw", 0.1, 0.1));
  tree.insert(msg("se", 0.1, 0.9));
  tree.insert(msg("nw", 0.9, 0.1));
  CHECK(tree.root().is_leaf());
  tree.insert(msg("ne", 0.9, 0.9));
  REQUIRE_FALSE(tree.root().is_leaf());
  for (const auto& child : tree.root().children) {
    CHECK(child->messages.size() == 1);
  }
  CHECK(tree.root().messages.empty());
}

TEST_CASE("depth cap prevents splitting") {
  QuadTree tree(kUnit, 4, 0);
  for (int i = 0; i < 20; ++i) {
    tree.insert(msg("m" + std::to_string(i), 0.1 + i * 0.04, 0.2));
  }
  CHECK(tree.root().is_leaf());
  CHECK(tree.root().messages.size() == 20);
}

TEST_CASE("out-of-region insert is rejected") {
  QuadTree tree(kUnit, 4, 8);
  CHECK_THROWS_AS(tree.insert(msg("x", 1.5, 0.5)), ConfigError);
}

TEST_CASE("collect_subtree gathers and orders the subtree") {
  QuadTree tree(kUnit, 2, 8);
  tree.insert(msg("b", 0.1, 0.1, 5));
  tree.insert(msg("a", 0.15, 0.12, 5));
  tree.insert(msg("c", 0.9, 0.9, 1));
  auto all = collect_subtree(tree.root());
  REQUIRE(all.size() == 3);
  CHECK(all[0].id == "c");  // earliest ts first
  CHECK(all[1].id == "a");  // ties break by id
  CHECK(all[2].id == "b");

  // internal node: children collections are disjoint and cover the node
  if (!tree.root().is_leaf()) {
    std::multiset<std::string> unioned;
    for (const auto& child : tree.root().children) {
      for (const auto& m : collect_subtree(*child)) unioned.insert(m.id);
    }
    CHECK(unioned == std::multiset<std::string>{"a", "b", "c"});
  }
}

TEST_CASE("randomized partition, capacity, depth and order independence") {
  Rng rng(77);
  for (int instance = 0; instance < 100; ++instance) {
    const int m_s = 2 + static_cast<int>(rng.uniform_below(6));
    const int depth_max = 1 + static_cast<int>(rng.uniform_below(6));
    const int n = 1 + static_cast<int>(rng.uniform_below(120));

    std::vector<GeoMessage> msgs;
    for (int i = 0; i < n; ++i) {
      // duplicate coordinates exercise the cascade-split depth cap
      const bool dup = !msgs.empty() && rng.uniform01() < 0.1;
      const double lat = dup ? msgs.back().lat : rng.uniform01();
      const double lon = dup ? msgs.back().lon : rng.uniform01();
      msgs.push_back(msg("m" + std::to_string(i), lat, lon,
                         static_cast<std::int64_t>(rng.uniform_below(1000))));
    }

    QuadTree tree(kUnit, m_s, depth_max);
    for (const auto& m : msgs) tree.insert(m);

    // partition: the root collection is exactly the inserted multiset
    auto collected = collect_subtree(tree.root());
    REQUIRE(collected.size() == msgs.size());
    std::multiset<std::string> in_ids, out_ids;
    for (const auto& m : msgs) in_ids.insert(m.id);
    for (const auto& m : collected) out_ids.insert(m.id);
    CHECK(in_ids == out_ids);

    // capacity, depth bound, membership containment
    preorder(tree.root(), [&](const QuadNode& node) {
      CHECK(node.depth <= depth_max);
      if (node.is_leaf()) {
        if (node.depth < depth_max) {
          CHECK(static_cast<int>(node.messages.size()) <= m_s);
        }
        for (const auto& m : node.messages) {
          CHECK(node.region.contains(m.lat, m.lon));
        }
      } else {
        CHECK(node.messages.empty());
      }
    });

    // insertion order independence of the leaf membership
    auto shuffled = msgs;
    for (std::size_t i = shuffled.size(); i > 1; --i) {
      std::swap(shuffled[i - 1], shuffled[rng.uniform_below(i)]);
    }
    QuadTree tree2(kUnit, m_s, depth_max);
    for (const auto& m : shuffled) tree2.insert(m);
    CHECK(leaf_map(tree.root()) == leaf_map(tree2.root()));
  }
}
