#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "geotail/types.hpp"

namespace geotail {

/// Quadrant order within a node: SW, SE, NW, NE. A point exactly on a midline
/// goes to the higher-coordinate child (closed-low / open-high).
int point_quadrant(const Region& region, double lat, double lon);

Region quadrant_region(const Region& region, int quadrant);

/// One node of the 4-way partition. Internal nodes hold no messages (all of
/// them live in the leaves); path encodes the quadrant sequence from the root
/// ("" = root, "30" = child 3 then its child 0).
struct QuadNode {
  Region region;
  int depth = 0;
  std::string path;
  std::vector<GeoMessage> messages;                // leaf payload
  std::array<std::unique_ptr<QuadNode>, 4> children;

  bool is_leaf() const { return children[0] == nullptr; }
};

/// Recursive equal 4-way spatial partition. A leaf that reaches m_s messages
/// after an insertion splits and redistributes (so leaves above the depth cap
/// hold fewer than m_s); nodes at depth D never split.
class QuadTree {
 public:
  QuadTree(Region region, int m_s, int depth_max);

  /// Routes to the unique leaf containing the coordinates, splitting as
  /// needed. Throws ConfigError on coordinates outside the root region.
  void insert(GeoMessage message);

  const QuadNode& root() const { return *root_; }
  int m_s() const { return m_s_; }
  int depth_max() const { return depth_max_; }
  std::size_t size() const { return size_; }

 private:
  void split(QuadNode& node);

  std::unique_ptr<QuadNode> root_;
  int m_s_;
  int depth_max_;
  std::size_t size_ = 0;
};

/// Multiset union over the node's leaf descendants, sorted by (ts, id).
std::vector<GeoMessage> collect_subtree(const QuadNode& node);

/// Pre-order traversal (node, then children 0..3); visits each node once, so
/// emission follows node-path lexicographic order.
template <typename Fn>
void preorder(const QuadNode& node, Fn&& fn) {
  fn(node);
  if (!node.is_leaf()) {
    for (const auto& child : node.children) preorder(*child, fn);
  }
}

}  // namespace geotail
