#include "lqg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lqg/error.hpp"

namespace lqg {
namespace {

// Candidate squares at `level` containing p: 1, 2 or 4 of them.
template <class Fn>
void for_each_candidate(const Point& p, int level, Fn&& fn) {
  const double gx = std::ldexp(p.x(), level), gy = std::ldexp(p.y(), level);
  const auto ix = static_cast<std::int64_t>(std::floor(gx));
  const auto iy = static_cast<std::int64_t>(std::floor(gy));
  const bool on_x = gx == std::floor(gx), on_y = gy == std::floor(gy);
  for (int dx = on_x ? -1 : 0; dx <= 0; ++dx)
    for (int dy = on_y ? -1 : 0; dy <= 0; ++dy) fn(DyadicSquare{level, ix + dx, iy + dy});
}

struct EdgeRecord {
  std::int64_t x, y0, y1;
  std::int32_t id;
};

struct BfsResult {
  std::vector<std::int64_t> counts;  // cumulative
  bool hazard = false;
  int hazard_radius = -1;
  bool capped = false;
  std::size_t explored = 0;
};

// Breadth-first search over an adapter exposing expand(u, out, hazard) and
// size(), recording cumulative layer counts up to r_max.
template <class Adapter>
BfsResult run_bfs(Adapter& g, const std::vector<NodeId>& sources, int r_max, std::size_t budget) {
  BfsResult res;
  std::vector<int> dist(g.size(), -1);
  auto mark = [&dist](NodeId v, int d) {
    if (static_cast<std::size_t>(v) >= dist.size()) dist.resize(static_cast<std::size_t>(v) + 1 + dist.size() / 2, -1);
    if (dist[static_cast<std::size_t>(v)] >= 0) return false;
    dist[static_cast<std::size_t>(v)] = d;
    return true;
  };
  std::vector<NodeId> frontier;
  for (NodeId s : sources)
    if (mark(s, 0)) frontier.push_back(s);
  res.counts.push_back(static_cast<std::int64_t>(frontier.size()));
  res.explored = frontier.size();

  std::vector<NodeId> next, nbrs;
  for (int r = 0; r < r_max; ++r) {
    next.clear();
    for (NodeId u : frontier) {
      bool hazard = false;
      g.expand(u, nbrs, hazard);
      if (hazard && !res.hazard) {
        res.hazard = true;
        res.hazard_radius = r + 1;
      }
      for (NodeId v : nbrs)
        if (mark(v, r + 1)) next.push_back(v);
    }
    res.explored += next.size();
    if (res.explored > budget) {
      res.capped = true;
      return res;
    }
    if (next.empty()) {
      res.counts.resize(static_cast<std::size_t>(r_max) + 1, res.counts.back());
      return res;
    }
    res.counts.push_back(res.counts.back() + static_cast<std::int64_t>(next.size()));
    frontier.swap(next);
  }
  return res;
}

struct MeetResult {
  Distance steps;
  bool capped = false;
  std::size_t explored = 0;
};

// Bidirectional breadth-first search. Each round expands one complete level of
// the smaller frontier; the first round that reaches the other side yields the
// exact distance as the minimum over all meetings found in that round.
template <class Adapter>
MeetResult run_meet(Adapter& g, const std::vector<NodeId>& from, const std::vector<NodeId>& to, std::size_t budget) {
  MeetResult res;
  std::vector<int> da, db;
  auto get = [](const std::vector<int>& d, NodeId v) {
    return static_cast<std::size_t>(v) < d.size() ? d[static_cast<std::size_t>(v)] : -1;
  };
  auto put = [](std::vector<int>& d, NodeId v, int x) {
    if (static_cast<std::size_t>(v) >= d.size()) d.resize(static_cast<std::size_t>(v) + 1 + d.size() / 2, -1);
    d[static_cast<std::size_t>(v)] = x;
  };
  std::vector<NodeId> fa, fb;
  for (NodeId v : from)
    if (get(da, v) < 0) {
      put(da, v, 0);
      fa.push_back(v);
    }
  for (NodeId v : to)
    if (get(db, v) < 0) {
      put(db, v, 0);
      fb.push_back(v);
    }
  res.explored = fa.size() + fb.size();
  for (NodeId v : fa)
    if (get(db, v) == 0) {
      res.steps = 0;
      return res;
    }
  int depth_a = 0, depth_b = 0;
  std::vector<NodeId> next, nbrs;
  while (!fa.empty() && !fb.empty()) {
    const bool side_a = fa.size() <= fb.size();
    auto& frontier = side_a ? fa : fb;
    auto& mine = side_a ? da : db;
    const auto& other = side_a ? db : da;
    int& depth = side_a ? depth_a : depth_b;
    next.clear();
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (NodeId u : frontier) {
      bool hazard = false;
      g.expand(u, nbrs, hazard);
      for (NodeId v : nbrs) {
        if (get(mine, v) >= 0) continue;
        put(mine, v, depth + 1);
        next.push_back(v);
        if (const int o = get(other, v); o >= 0) best = std::min<std::int64_t>(best, depth + 1 + o);
      }
    }
    ++depth;
    res.explored += next.size();
    if (best != std::numeric_limits<std::int64_t>::max()) {
      res.steps = best;
      return res;
    }
    if (res.explored > budget) {
      res.capped = true;
      return res;
    }
    frontier.swap(next);
  }
  return res;
}

struct EagerAdapter {
  const AdjacencyGraph& g;
  std::size_t size() const { return g.size(); }
  void expand(NodeId u, std::vector<NodeId>& out, bool& hazard) const {
    const auto n = g.neighbors(u);
    out.assign(n.begin(), n.end());
    hazard = g.touches_unresolved(u) || g.touches_boundary(u);
  }
};

struct LazyAdapter {
  LazyTiling& t;
  std::unordered_map<DyadicSquare, NodeId, DyadicSquareHash> ids;
  std::vector<DyadicSquare> squares;
  LazyTiling::Neighborhood scratch;

  std::size_t size() const { return squares.size(); }
  NodeId id(const DyadicSquare& s) {
    auto [it, inserted] = ids.emplace(s, static_cast<NodeId>(squares.size()));
    if (inserted) squares.push_back(s);
    return it->second;
  }
  void expand(NodeId u, std::vector<NodeId>& out, bool& hazard) {
    t.neighbors(squares[static_cast<std::size_t>(u)], scratch);
    out.clear();
    for (const auto& s : scratch.squares) out.push_back(id(s));
    hazard = scratch.touches_unresolved || scratch.touches_boundary;
  }
};

BallProfile to_profile(const BfsResult& res, const Point& center, int r_max) {
  BallProfile p;
  p.center = center;
  p.counts = res.counts;
  p.capped = res.capped;
  if (res.hazard && res.hazard_radius <= r_max) {
    p.truncated = true;
    p.truncation_radius = res.hazard_radius;
  }
  if (res.capped) p.truncated = true;
  return p;
}

}  // namespace

bool intersects(const Region& region, const DyadicSquare& s) {
  return std::visit(
      [&s](const auto& r) -> bool {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, PointSet>) {
          return std::any_of(r.points.begin(), r.points.end(), [&s](const Point& p) { return s.contains(p); });
        } else if constexpr (std::is_same_v<T, Rect>) {
          return r.lo.x() <= s.x1() && s.x0() <= r.hi.x() && r.lo.y() <= s.y1() && s.y0() <= r.hi.y();
        } else {
          const double cx = std::clamp(r.center.x(), s.x0(), s.x1());
          const double cy = std::clamp(r.center.y(), s.y0(), s.y1());
          return (Point(cx, cy) - r.center).norm() <= r.radius;
        }
      },
      region);
}

AdjacencyGraph build_adjacency(const Tiling& t) {
  AdjacencyGraph g;
  g.domain_ = t.domain;
  const std::size_t n = t.squares.size();
  g.squares_.reserve(n);
  int max_level = t.domain.level;
  for (const auto& c : t.squares) {
    g.squares_.push_back(c.square);
    max_level = std::max(max_level, c.square.level);
  }
  for (const auto& c : t.unresolved) {
    max_level = std::max(max_level, c.square.level);
    g.unresolved_.insert(c.square);
  }
  g.max_level_ = max_level;
  if (max_level - t.domain.level > 60) throw CapacityError("tiling too deep for exact integer adjacency");
  for (std::size_t i = 0; i < n; ++i) g.index_.emplace(g.squares_[i], static_cast<NodeId>(i));

  // Entities: squares get ids 0..n-1, unresolved cells n.. for hazard marking.
  const std::size_t total = n + t.unresolved.size();
  auto box = [&](std::size_t k) {
    const DyadicSquare& s = k < n ? t.squares[k].square : t.unresolved[k - n].square;
    const int shift = max_level - s.level;
    return std::array<std::int64_t, 4>{s.ix * (std::int64_t{1} << shift), (s.ix + 1) * (std::int64_t{1} << shift),
                                       s.iy * (std::int64_t{1} << shift), (s.iy + 1) * (std::int64_t{1} << shift)};
  };
  const int dshift = max_level - t.domain.level;
  const std::int64_t dx0 = t.domain.ix * (std::int64_t{1} << dshift), dx1 = (t.domain.ix + 1) * (std::int64_t{1} << dshift);
  const std::int64_t dy0 = t.domain.iy * (std::int64_t{1} << dshift), dy1 = (t.domain.iy + 1) * (std::int64_t{1} << dshift);

  g.hazard_.assign(n, 0);
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<EdgeRecord> high, low;
  high.reserve(total);
  low.reserve(total);
  for (int axis = 0; axis < 2; ++axis) {
    high.clear();
    low.clear();
    for (std::size_t k = 0; k < total; ++k) {
      const auto b = box(k);
      const auto id = static_cast<std::int32_t>(k);
      if (axis == 0) {  // vertical shared edges: my right edge meets your left edge
        high.push_back({b[1], b[2], b[3], id});
        low.push_back({b[0], b[2], b[3], id});
      } else {
        high.push_back({b[3], b[0], b[1], id});
        low.push_back({b[2], b[0], b[1], id});
      }
    }
    auto order = [](const EdgeRecord& a, const EdgeRecord& b) { return a.x != b.x ? a.x < b.x : a.y0 < b.y0; };
    std::sort(high.begin(), high.end(), order);
    std::sort(low.begin(), low.end(), order);
    std::size_t i = 0, j = 0;
    while (i < high.size() && j < low.size()) {
      const auto& a = high[i];
      const auto& b = low[j];
      if (a.x < b.x) { ++i; continue; }
      if (a.x > b.x) { ++j; continue; }
      if (std::min(a.y1, b.y1) > std::max(a.y0, b.y0)) {
        const bool sa = static_cast<std::size_t>(a.id) < n, sb = static_cast<std::size_t>(b.id) < n;
        if (sa && sb) edges.emplace_back(a.id, b.id);
        else if (sa) g.hazard_[static_cast<std::size_t>(a.id)] |= 1;
        else if (sb) g.hazard_[static_cast<std::size_t>(b.id)] |= 1;
      }
      if (a.y1 < b.y1) ++i;
      else if (a.y1 > b.y1) ++j;
      else { ++i; ++j; }
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    const auto b = box(k);
    if (b[0] == dx0 || b[1] == dx1 || b[2] == dy0 || b[3] == dy1) g.hazard_[k] |= 2;
  }

  std::vector<std::size_t> degree(n, 0);
  for (const auto& [a, b] : edges) {
    ++degree[static_cast<std::size_t>(a)];
    ++degree[static_cast<std::size_t>(b)];
  }
  g.offsets_.assign(n + 1, 0);
  for (std::size_t k = 0; k < n; ++k) g.offsets_[k + 1] = g.offsets_[k] + degree[k];
  g.adjacency_.resize(g.offsets_[n]);
  std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& [a, b] : edges) {
    g.adjacency_[fill[static_cast<std::size_t>(a)]++] = b;
    g.adjacency_[fill[static_cast<std::size_t>(b)]++] = a;
  }
  for (std::size_t k = 0; k < n; ++k)
    std::sort(g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[k]),
              g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[k + 1]));
  return g;
}

std::vector<NodeId> AdjacencyGraph::containing(const Point& p) const {
  std::vector<NodeId> out;
  if (!domain_.contains(p)) return out;
  for (int level = domain_.level; level <= max_level_; ++level)
    for_each_candidate(p, level, [&](const DyadicSquare& s) {
      if (auto it = index_.find(s); it != index_.end()) out.push_back(it->second);
    });
  std::sort(out.begin(), out.end());
  return out;
}

bool AdjacencyGraph::in_unresolved(const Point& p) const {
  bool hit = false;
  if (unresolved_.empty() || !domain_.contains(p)) return false;
  for (int level = domain_.level; level <= max_level_ && !hit; ++level)
    for_each_candidate(p, level, [&](const DyadicSquare& s) { hit = hit || unresolved_.count(s) > 0; });
  return hit;
}

std::vector<NodeId> AdjacencyGraph::intersecting(const Region& region) const {
  std::vector<NodeId> out;
  for (std::size_t k = 0; k < squares_.size(); ++k)
    if (intersects(region, squares_[k])) out.push_back(static_cast<NodeId>(k));
  return out;
}

Distance set_distance(const AdjacencyGraph& g, const Region& a, const Region& b) {
  const auto sources = g.intersecting(a);
  const auto targets = g.intersecting(b);
  if (sources.empty() || targets.empty()) return std::nullopt;
  EagerAdapter adapter{g};
  return run_meet(adapter, sources, targets, std::numeric_limits<std::size_t>::max()).steps;
}

Distance distance(const AdjacencyGraph& g, const Point& z, const Point& w) {
  return set_distance(g, PointSet{{z}}, PointSet{{w}});
}

BallProfile ball_profile(const AdjacencyGraph& g, const Point& center, int r_max) {
  if (r_max < 0) throw DomainError("ball radius must be non-negative");
  const auto sources = g.containing(center);
  if (sources.empty()) throw DomainError("ball center is not covered by a resolved square");
  EagerAdapter adapter{g};
  const auto res = run_bfs(adapter, sources, r_max, std::numeric_limits<std::size_t>::max());
  return to_profile(res, center, r_max);
}

LazyDistance distance(LazyTiling& t, const Point& z, const Point& w, std::size_t node_budget) {
  LazyDistance out;
  const auto from = t.locate(z);
  const auto to = t.locate(w);
  if (from.squares.empty() || to.squares.empty()) return out;
  LazyAdapter adapter{t, {}, {}, {}};
  std::vector<NodeId> sources, targets;
  for (const auto& s : from.squares) sources.push_back(adapter.id(s));
  for (const auto& s : to.squares) targets.push_back(adapter.id(s));
  const auto res = run_meet(adapter, sources, targets, node_budget);
  out.steps = res.steps;
  out.capped = res.capped;
  out.explored = res.explored;
  return out;
}

BallProfile ball_profile(LazyTiling& t, const Point& center, int r_max, std::size_t node_budget) {
  if (r_max < 0) throw DomainError("ball radius must be non-negative");
  const auto located = t.locate(center);
  if (located.squares.empty()) throw DomainError("ball center is not covered by a resolved square");
  LazyAdapter adapter{t, {}, {}, {}};
  std::vector<NodeId> sources;
  for (const auto& s : located.squares) sources.push_back(adapter.id(s));
  const auto res = run_bfs(adapter, sources, r_max, node_budget);
  return to_profile(res, center, r_max);
}

}  // namespace lqg
