#include <cmath>

#include "lqg/error.hpp"
#include "lqg/tiling.hpp"

namespace lqg {
namespace {

// Sides: 0 left, 1 right, 2 bottom, 3 top.
DyadicSquare across(const DyadicSquare& s, int side) {
  switch (side) {
    case 0: return {s.level, s.ix - 1, s.iy};
    case 1: return {s.level, s.ix + 1, s.iy};
    case 2: return {s.level, s.ix, s.iy - 1};
    default: return {s.level, s.ix, s.iy + 1};
  }
}

// The two children of t that touch the edge facing a square on `side` of t's neighbor.
// `side` is the side of the original square, so the facing edge of t is the opposite one.
std::array<DyadicSquare, 2> facing_children(const DyadicSquare& t, int side) {
  switch (side) {
    case 0: return {t.child(1), t.child(3)};  // t is to the left: its right column
    case 1: return {t.child(0), t.child(2)};
    case 2: return {t.child(2), t.child(3)};  // t is below: its top row
    default: return {t.child(0), t.child(1)};
  }
}

}  // namespace

LazyTiling::LazyTiling(const DyadicSquare& domain, double epsilon, FieldPtr field, const Params& params,
                       int depth_cap, std::size_t max_evaluated)
    : domain_(domain),
      epsilon_(epsilon),
      field_(std::move(field)),
      params_(params),
      depth_cap_(depth_cap),
      max_evaluated_(max_evaluated) {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (depth_cap <= domain.level) throw ConfigError("depth cap must exceed the domain level");
}

LazyTiling::Status LazyTiling::status(const DyadicSquare& s) {
  if (s.level < domain_.level || !domain_.contains(s)) return Status::kOutside;
  if (s.level > depth_cap_) {
    const Status capped = status(s.ancestor(depth_cap_));
    if (capped == Status::kUnresolved || capped == Status::kBelowUnresolved) return Status::kBelowUnresolved;
    if (capped == Status::kSplit) return Status::kBelowUnresolved;  // unreachable: cap squares never split
    return Status::kBelow;
  }
  if (auto it = memo_.find(s); it != memo_.end()) return it->second;
  if (s != domain_) {
    const Status up = status(s.parent());
    if (up == Status::kAccepted || up == Status::kBelow) return Status::kBelow;
    if (up == Status::kUnresolved || up == Status::kBelowUnresolved) return Status::kBelowUnresolved;
  }
  if (memo_.size() >= max_evaluated_)
    throw CapacityError("lazy tiling evaluated more than " + std::to_string(max_evaluated_) + " squares");
  const double m = mass(s, *field_, params_);
  const Status st = m <= epsilon_ ? Status::kAccepted : (s.level >= depth_cap_ ? Status::kUnresolved : Status::kSplit);
  memo_.emplace(s, st);
  return st;
}

void LazyTiling::locate_in(const DyadicSquare& s, const Point& p, Located& out) {
  switch (status(s)) {
    case Status::kAccepted: out.squares.push_back(s); return;
    case Status::kUnresolved: out.unresolved = true; return;
    case Status::kSplit:
      for (int k = 0; k < 4; ++k)
        if (s.child(k).contains(p)) locate_in(s.child(k), p, out);
      return;
    default: return;
  }
}

LazyTiling::Located LazyTiling::locate(const Point& p) {
  Located out;
  if (domain_.contains(p)) locate_in(domain_, p, out);
  std::sort(out.squares.begin(), out.squares.end());
  return out;
}

void LazyTiling::collect_along(const DyadicSquare& t, int side, Neighborhood& out) {
  switch (status(t)) {
    case Status::kAccepted: out.squares.push_back(t); return;
    case Status::kUnresolved:
    case Status::kBelowUnresolved: out.touches_unresolved = true; return;
    case Status::kOutside: out.touches_boundary = true; return;
    case Status::kBelow: {
      DyadicSquare a = t.parent();
      while (status(a) != Status::kAccepted) a = a.parent();
      out.squares.push_back(a);
      return;
    }
    case Status::kSplit:
      for (const auto& c : facing_children(t, side)) collect_along(c, side, out);
      return;
  }
}

void LazyTiling::neighbors(const DyadicSquare& s, Neighborhood& out) {
  out.squares.clear();
  out.touches_unresolved = false;
  out.touches_boundary = false;
  for (int side = 0; side < 4; ++side) collect_along(across(s, side), side, out);
}

}  // namespace lqg
