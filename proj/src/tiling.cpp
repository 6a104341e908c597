#include "lqg/tiling.hpp"

#include <algorithm>
#include <cmath>

#include "lqg/error.hpp"

namespace lqg {

double mass(const DyadicSquare& s, const FieldRealization& field, const Params& params) {
  const double h = field(FieldNode::of(s));
  if (h == kSingularValue) return kSingularValue;
  return std::exp(h) * std::pow(s.side(), params.q);
}

Tiling subdivide(const DyadicSquare& domain, double epsilon, const FieldRealization& field, const Params& params,
                 const SubdivideOptions& options) {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (options.depth_cap <= domain.level) throw ConfigError("depth cap must exceed the domain level");

  Tiling t;
  t.domain = domain;
  t.epsilon = epsilon;
  t.depth_cap = options.depth_cap;
  t.params = params;
  t.field_id = field.id();
  t.seed = field.seed();

  std::size_t visited = 0;
  std::vector<DyadicSquare> stack;
  if (!options.region || options.region(domain)) stack.push_back(domain);
  while (!stack.empty()) {
    const DyadicSquare s = stack.back();
    stack.pop_back();
    if (++visited > options.max_visited)
      throw CapacityError("subdivision visited more than " + std::to_string(options.max_visited) + " squares");
    const double m = mass(s, field, params);
    if (m <= epsilon) {
      t.squares.push_back({s, m});
    } else if (s.level >= options.depth_cap) {
      t.unresolved.push_back({s, m});
    } else {
      for (int k = 3; k >= 0; --k) {
        const DyadicSquare c = s.child(k);
        if (!options.region || options.region(c)) stack.push_back(c);
      }
    }
  }
  auto by_square = [](const Cell& a, const Cell& b) { return a.square < b.square; };
  std::sort(t.squares.begin(), t.squares.end(), by_square);
  std::sort(t.unresolved.begin(), t.unresolved.end(), by_square);
  return t;
}

Tiling subdivide(const DyadicSquare& domain, double epsilon, const FieldRealization& field, const Params& params,
                 int depth_cap) {
  SubdivideOptions options;
  options.depth_cap = depth_cap;
  return subdivide(domain, epsilon, field, params, options);
}

ThickPointEstimate thick_point_estimate(const Point& z, const FieldRealization& field, int level_lo,
                                        int level_hi) {
  if (level_hi < level_lo) throw DomainError("thick point estimate needs a non-empty level range");
  ThickPointEstimate out;
  const double n = level_hi - level_lo + 1;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int level = level_lo; level <= level_hi; ++level) {
    const double gx = std::ldexp(z.x(), level), gy = std::ldexp(z.y(), level);
    auto ix = static_cast<std::int64_t>(std::floor(gx));
    auto iy = static_cast<std::int64_t>(std::floor(gy));
    if (gx == std::floor(gx)) {
      out.on_grid_line = true;
      --ix;
    }
    if (gy == std::floor(gy)) {
      out.on_grid_line = true;
      --iy;
    }
    const DyadicSquare s{level, ix, iy};
    const double x = level * std::log(2.0);
    const double y = field(FieldNode::of(s));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  out.slope = denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
  return out;
}

double max_side(const Tiling& t) {
  if (t.squares.empty()) throw DomainError("max_side of an empty tiling");
  // Squares are sorted by level, so the first has the largest side.
  return t.squares.front().square.side();
}

double max_accepted_side(const DyadicSquare& domain, double epsilon, const FieldRealization& field,
                         const Params& params, int depth_cap) {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (depth_cap <= domain.level) throw ConfigError("depth cap must exceed the domain level");
  std::vector<DyadicSquare> frontier{domain}, next;
  while (!frontier.empty()) {
    next.clear();
    for (const auto& s : frontier) {
      if (mass(s, field, params) <= epsilon) return s.side();
      if (s.level < depth_cap)
        for (int k = 0; k < 4; ++k) next.push_back(s.child(k));
    }
    frontier.swap(next);
  }
  throw DomainError("no accepted square above the depth cap");
}

}  // namespace lqg
