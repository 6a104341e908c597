#pragma once

#include <cstdint>
#include <string>

#include "lqg/dyadic.hpp"
#include "lqg/tiling.hpp"

namespace lqg {

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Deterministic test sets of known dimension inside the unit square. All sets
/// are closed, and intersection with a dyadic square is decided in exact
/// integer arithmetic. Cantor sets (two pieces of ratio 1/m) are evaluated
/// through their level-d cylinder enclosure, so the predicate is a superset
/// test at depth d and exact whenever a whole cylinder lies in the square.
class FractalSet {
 public:
  enum class Kind { kPoint, kHorizontalSegment, kSquareBoundary, kCantorProduct, kCantorDust, kRationalGrid };

  static FractalSet point(Rational x, Rational y);
  static FractalSet horizontal_segment(Rational y, Rational x0 = {0, 1}, Rational x1 = {1, 1});
  static FractalSet square_boundary(Rational x0, Rational y0, Rational side);
  /// C x [0, 1] with C the two-piece Cantor set of ratio 1/inverse_ratio.
  static FractalSet cantor_product(int inverse_ratio = 3, int construction_depth = -1);
  /// C x C.
  static FractalSet cantor_dust(int inverse_ratio = 3, int construction_depth = -1);
  /// {(a/q, b/q) : 1 <= q <= max_denominator, 0 <= a, b <= q}; Hausdorff dimension 0
  /// while its box-counting dimension at fine scales looks like 2 until exhausted.
  static FractalSet rational_grid(int max_denominator);

  /// "point:1/3,1/3", "segment:1/2" or "segment:1/2,0,1", "square-boundary:0,0,1",
  /// "cantor-product:3", "cantor-dust:3", "rational-grid:16".
  static FractalSet parse(const std::string& descriptor);
  std::string descriptor() const;

  Kind kind() const { return kind_; }
  double nominal_dimension() const;
  int construction_depth() const { return depth_; }

  bool intersects(const DyadicSquare& s) const;

  /// Number of dyadic squares of side 2^-level in [0,1]^2 meeting the set.
  std::int64_t euclidean_count(int level) const;

 private:
  Kind kind_ = Kind::kPoint;
  Rational a_, b_, c_;  // kind-specific coordinates
  int m_ = 3;           // Cantor inverse ratio or grid denominator bound
  int depth_ = 0;       // Cantor construction depth
};

struct QuantumCount {
  std::int64_t count = 0;
  std::int64_t unresolved_hits = 0;
};

/// Accepted squares meeting X, and unresolved cells meeting X.
QuantumCount quantum_count(const FractalSet& x, const Tiling& t);

}  // namespace lqg
