#pragma once

#include <Eigen/Core>
#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>

namespace lqg {

using Point = Eigen::Vector2d;

/// Closed square [ix 2^-level, (ix+1) 2^-level] x [iy 2^-level, (iy+1) 2^-level].
/// Corner and center coordinates are exact doubles for level <= 50.
struct DyadicSquare {
  int level = 0;
  std::int64_t ix = 0;
  std::int64_t iy = 0;

  auto operator<=>(const DyadicSquare&) const = default;

  double side() const { return std::ldexp(1.0, -level); }
  double x0() const { return std::ldexp(static_cast<double>(ix), -level); }
  double y0() const { return std::ldexp(static_cast<double>(iy), -level); }
  double x1() const { return std::ldexp(static_cast<double>(ix + 1), -level); }
  double y1() const { return std::ldexp(static_cast<double>(iy + 1), -level); }
  Point center() const {
    return {std::ldexp(2.0 * static_cast<double>(ix) + 1.0, -level - 1),
            std::ldexp(2.0 * static_cast<double>(iy) + 1.0, -level - 1)};
  }

  /// Children in order 0:(lo,lo) 1:(hi,lo) 2:(lo,hi) 3:(hi,hi).
  DyadicSquare child(int k) const { return {level + 1, 2 * ix + (k & 1), 2 * iy + ((k >> 1) & 1)}; }
  DyadicSquare parent() const { return {level - 1, ix >> 1, iy >> 1}; }

  /// Ancestor (or self) at a coarser level.
  DyadicSquare ancestor(int at_level) const {
    const int shift = level - at_level;
    return {at_level, ix >> shift, iy >> shift};
  }

  /// True when `other` is this square or one of its descendants.
  bool contains(const DyadicSquare& other) const {
    return other.level >= level && other.ancestor(level) == *this;
  }

  /// Closed containment; exact because scaling by a power of two is exact.
  bool contains(const Point& p) const {
    const double sx = std::ldexp(p.x(), level);
    const double sy = std::ldexp(p.y(), level);
    const auto fx = static_cast<double>(ix), fy = static_cast<double>(iy);
    return sx >= fx && sx <= fx + 1.0 && sy >= fy && sy <= fy + 1.0;
  }
};

struct DyadicSquareHash {
  std::size_t operator()(const DyadicSquare& s) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(s.level) * 0x9E3779B97F4A7C15ULL;
    h ^= static_cast<std::uint64_t>(s.ix) + 0x7F4A7C159E3779B9ULL + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(s.iy) * 0xC2B2AE3D27D4EB4FULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h ^ (h >> 31));
  }
};

/// Predicate selecting the squares a restricted computation should visit.
using SquarePredicate = std::function<bool(const DyadicSquare&)>;

}  // namespace lqg
