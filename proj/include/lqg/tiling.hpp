#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "lqg/dyadic.hpp"
#include "lqg/field.hpp"
#include "lqg/params.hpp"

namespace lqg {

struct Cell {
  DyadicSquare square;
  double mass = 0.0;
  bool operator==(const Cell& o) const {
    return square == o.square && (mass == o.mass || (mass != mass && o.mass != o.mass));
  }
};

/// Maximal dyadic squares S inside `domain` with mass(S) <= epsilon, plus the
/// depth-cap squares whose mass still exceeds epsilon (`unresolved`). Both
/// lists are sorted by (level, ix, iy).
struct Tiling {
  DyadicSquare domain;
  double epsilon = 1.0;
  int depth_cap = 24;
  Params params;
  std::string field_id;
  std::uint64_t seed = 0;
  std::vector<Cell> squares;
  std::vector<Cell> unresolved;

  bool operator==(const Tiling&) const = default;
};

/// e^{h_{|S|/2}(v_S)} |S|^Q, or +inf when the field is singular at v_S.
double mass(const DyadicSquare& s, const FieldRealization& field, const Params& params);

struct SubdivideOptions {
  int depth_cap = 24;
  /// When set, only squares satisfying the predicate are refined or reported.
  /// The predicate must be inherited by ancestors (S' contains S and region(S) implies region(S')).
  SquarePredicate region;
  std::size_t max_visited = 20'000'000;
};

/// Depth-first refinement of `domain`: accept on mass <= epsilon, split on
/// mass > epsilon, flag depth-cap squares that still exceed epsilon.
Tiling subdivide(const DyadicSquare& domain, double epsilon, const FieldRealization& field, const Params& params,
                 const SubdivideOptions& options);
Tiling subdivide(const DyadicSquare& domain, double epsilon, const FieldRealization& field, const Params& params,
                 int depth_cap = 24);

struct ThickPointEstimate {
  double slope = 0.0;
  bool on_grid_line = false;
};

/// Least-squares slope of h_{2^{-n-1}}(v_{S_n(z)}) against n log 2 over
/// levels [level_lo, level_hi]. A point on a grid line uses the
/// lexicographically smallest containing square and sets the flag.
ThickPointEstimate thick_point_estimate(const Point& z, const FieldRealization& field, int level_lo, int level_hi);

/// Largest side length among accepted squares.
double max_side(const Tiling& t);

/// max_side of the tiling subdivide(domain, ...) would produce, found by a
/// level-order scan that stops at the first level holding an accepted square.
double max_accepted_side(const DyadicSquare& domain, double epsilon, const FieldRealization& field,
                         const Params& params, int depth_cap = 24);

/// Tiling evaluated on demand. Square status is decided top-down and memoized,
/// so a query touches only the ancestors of the squares it asks about. Used
/// for graph exploration on domains whose full tiling would not fit in memory.
class LazyTiling {
 public:
  enum class Status : std::uint8_t { kSplit, kAccepted, kUnresolved, kBelow, kBelowUnresolved, kOutside };

  LazyTiling(const DyadicSquare& domain, double epsilon, FieldPtr field, const Params& params, int depth_cap,
             std::size_t max_evaluated = 30'000'000);

  Status status(const DyadicSquare& s);
  const DyadicSquare& domain() const { return domain_; }
  double epsilon() const { return epsilon_; }
  int depth_cap() const { return depth_cap_; }
  std::size_t evaluated() const { return memo_.size(); }

  struct Located {
    std::vector<DyadicSquare> squares;
    bool unresolved = false;
  };
  /// Accepted squares containing p (closed convention).
  Located locate(const Point& p);

  struct Neighborhood {
    std::vector<DyadicSquare> squares;
    bool touches_unresolved = false;
    bool touches_boundary = false;
  };
  /// Accepted squares sharing a positive-length segment with accepted square s.
  void neighbors(const DyadicSquare& s, Neighborhood& out);

 private:
  void collect_along(const DyadicSquare& t, int side, Neighborhood& out);
  void locate_in(const DyadicSquare& s, const Point& p, Located& out);

  DyadicSquare domain_;
  double epsilon_;
  FieldPtr field_;
  Params params_;
  int depth_cap_;
  std::size_t max_evaluated_;
  std::unordered_map<DyadicSquare, Status, DyadicSquareHash> memo_;
};

}  // namespace lqg
