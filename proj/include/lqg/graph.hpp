#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "lqg/tiling.hpp"

namespace lqg {

using NodeId = std::int32_t;

/// Regions for set distances. All are closed sets.
struct PointSet {
  std::vector<Point> points;
};
struct Rect {
  Point lo, hi;
};
struct Disk {
  Point center;
  double radius = 0.0;
};
using Region = std::variant<PointSet, Rect, Disk>;

bool intersects(const Region& region, const DyadicSquare& s);

/// Squares of a tiling with edges between squares sharing a segment of
/// positive length. Corner contact is not adjacency.
class AdjacencyGraph {
 public:
  std::size_t size() const { return squares_.size(); }
  const DyadicSquare& square(NodeId id) const { return squares_[static_cast<std::size_t>(id)]; }
  std::span<const NodeId> neighbors(NodeId id) const {
    const auto b = offsets_[static_cast<std::size_t>(id)], e = offsets_[static_cast<std::size_t>(id) + 1];
    return {adjacency_.data() + b, adjacency_.data() + e};
  }
  std::size_t edge_count() const { return adjacency_.size() / 2; }
  bool touches_unresolved(NodeId id) const { return hazard_[static_cast<std::size_t>(id)] & 1; }
  bool touches_boundary(NodeId id) const { return hazard_[static_cast<std::size_t>(id)] & 2; }
  const DyadicSquare& domain() const { return domain_; }

  /// Squares containing p, sorted by id.
  std::vector<NodeId> containing(const Point& p) const;
  /// True when p lies in an unresolved cell of the tiling.
  bool in_unresolved(const Point& p) const;
  std::vector<NodeId> intersecting(const Region& region) const;

  friend AdjacencyGraph build_adjacency(const Tiling& t);

 private:
  DyadicSquare domain_;
  int max_level_ = 0;
  std::vector<DyadicSquare> squares_;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> adjacency_;
  std::vector<std::uint8_t> hazard_;
  std::unordered_map<DyadicSquare, NodeId, DyadicSquareHash> index_;
  std::unordered_set<DyadicSquare, DyadicSquareHash> unresolved_;
};

/// Sweep over shared boundary coordinates in exact integer arithmetic; O(N log N).
AdjacencyGraph build_adjacency(const Tiling& t);

/// Graph distance in steps; nullopt when unreachable or a point is uncovered.
using Distance = std::optional<std::int64_t>;

Distance distance(const AdjacencyGraph& g, const Point& z, const Point& w);
Distance set_distance(const AdjacencyGraph& g, const Region& a, const Region& b);

/// Cumulative ball sizes #B_r for r = 0..r_max around the squares containing
/// the center. `truncated` is set once the explored ball touches an
/// unresolved cell or the domain boundary at a radius below r_max; counts past
/// `truncation_radius` are lower bounds. When a node budget stops the search,
/// `capped` is set and counts end at the last complete radius.
struct BallProfile {
  Point center = Point::Zero();
  std::vector<std::int64_t> counts;
  bool truncated = false;
  int truncation_radius = -1;
  bool capped = false;
};

BallProfile ball_profile(const AdjacencyGraph& g, const Point& center, int r_max);

/// The same queries on a lazily evaluated tiling, exploring only what the
/// breadth-first search reaches. `node_budget` bounds the explored squares.
struct LazyDistance {
  Distance steps;
  bool capped = false;
  std::size_t explored = 0;
};
LazyDistance distance(LazyTiling& t, const Point& z, const Point& w, std::size_t node_budget = 4'000'000);
BallProfile ball_profile(LazyTiling& t, const Point& center, int r_max, std::size_t node_budget = 4'000'000);

}  // namespace lqg
