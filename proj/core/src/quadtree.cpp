#include "geotail/quadtree.hpp"

#include <algorithm>

#include "geotail/errors.hpp"

namespace geotail {

int point_quadrant(const Region& region, double lat, double lon) {
  if (!region.contains(lat, lon)) {
    throw ConfigError("point_quadrant: point outside region");
  }
  const int north = lat >= region.mid_lat() ? 1 : 0;
  const int east = lon >= region.mid_lon() ? 1 : 0;
  return north * 2 + east;  // SW=0, SE=1, NW=2, NE=3
}

Region quadrant_region(const Region& region, int quadrant) {
  const double mlat = region.mid_lat();
  const double mlon = region.mid_lon();
  switch (quadrant) {
    case 0: return Region{region.min_lat, region.min_lon, mlat, mlon};
    case 1: return Region{region.min_lat, mlon, mlat, region.max_lon};
    case 2: return Region{mlat, region.min_lon, region.max_lat, mlon};
    case 3: return Region{mlat, mlon, region.max_lat, region.max_lon};
    default: throw ConfigError("quadrant_region: quadrant must be in 0..3");
  }
}

QuadTree::QuadTree(Region region, int m_s, int depth_max)
    : m_s_(m_s), depth_max_(depth_max) {
  validate_region(region);
  if (m_s < 1) throw ConfigError("quadtree: m_s must be >= 1");
  if (depth_max < 0) throw ConfigError("quadtree: D must be >= 0");
  root_ = std::make_unique<QuadNode>();
  root_->region = region;
}

void QuadTree::insert(GeoMessage message) {
  if (!root_->region.contains(message.lat, message.lon)) {
    throw ConfigError("quadtree: message '" + message.id + "' outside root region");
  }
  QuadNode* node = root_.get();
  while (!node->is_leaf()) {
    node = node->children[static_cast<std::size_t>(
                              point_quadrant(node->region, message.lat, message.lon))]
               .get();
  }
  node->messages.push_back(std::move(message));
  ++size_;
  if (static_cast<int>(node->messages.size()) >= m_s_ && node->depth < depth_max_) {
    split(*node);
  }
}

void QuadTree::split(QuadNode& node) {
  for (int q = 0; q < 4; ++q) {
    auto child = std::make_unique<QuadNode>();
    child->region = quadrant_region(node.region, q);
    child->depth = node.depth + 1;
    child->path = node.path + static_cast<char>('0' + q);
    node.children[static_cast<std::size_t>(q)] = std::move(child);
  }
  for (auto& m : node.messages) {
    const int q = point_quadrant(node.region, m.lat, m.lon);
    node.children[static_cast<std::size_t>(q)]->messages.push_back(std::move(m));
  }
  node.messages.clear();
  node.messages.shrink_to_fit();
  // Redistribution can land everything in one quadrant; keep splitting.
  for (auto& child : node.children) {
    if (static_cast<int>(child->messages.size()) >= m_s_ && child->depth < depth_max_) {
      split(*child);
    }
  }
}

std::vector<GeoMessage> collect_subtree(const QuadNode& node) {
  std::vector<GeoMessage> out;
  preorder(node, [&](const QuadNode& n) {
    if (n.is_leaf()) out.insert(out.end(), n.messages.begin(), n.messages.end());
  });
  std::sort(out.begin(), out.end(), [](const GeoMessage& a, const GeoMessage& b) {
    if (a.ts != b.ts) return a.ts < b.ts;
    return a.id < b.id;
  });
  return out;
}

}  // namespace geotail
