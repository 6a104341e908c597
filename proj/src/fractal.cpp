#include "lqg/fractal.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "lqg/error.hpp"

namespace lqg {
namespace {

using i128 = __int128;

// Exact rational with positive denominator.
struct Frac {
  i128 num, den;
};
bool le(const Frac& a, const Frac& b) { return a.num * b.den <= b.num * a.den; }
bool lt(const Frac& a, const Frac& b) { return a.num * b.den < b.num * a.den; }
Frac frac(const Rational& r) { return {r.num, r.den}; }

// Closed interval [k 2^-level, (k+1) 2^-level].
std::pair<Frac, Frac> dyadic_interval(std::int64_t k, int level) {
  if (level >= 0) {
    const i128 den = static_cast<i128>(1) << level;
    return {{k, den}, {static_cast<i128>(k) + 1, den}};
  }
  const i128 scale = static_cast<i128>(1) << (-level);
  return {{k * scale, 1}, {(static_cast<i128>(k) + 1) * scale, 1}};
}

// Does the ratio-1/m Cantor set (depth-d enclosure) meet [lo, hi]?
bool cantor_meets(int m, int depth, const Frac& lo, const Frac& hi) {
  struct Item {
    i128 c;
    int k;
    i128 scale;
  };
  std::vector<Item> stack{{0, 0, 1}};
  while (!stack.empty()) {
    const Item it = stack.back();
    stack.pop_back();
    const Frac a{it.c, it.scale}, b{it.c + 1, it.scale};
    if (lt(hi, a) || lt(b, lo)) continue;
    // Cylinder endpoints belong to the set, so containment or an endpoint hit is exact.
    if (it.k == depth || (le(lo, a) && le(a, hi)) || (le(lo, b) && le(b, hi))) return true;
    stack.push_back({it.c * m + (m - 1), it.k + 1, it.scale * m});
    stack.push_back({it.c * m, it.k + 1, it.scale * m});
  }
  return false;
}

int default_depth(int m) { return static_cast<int>(std::floor(62.0 / std::log2(static_cast<double>(m)))); }

Rational parse_rational(const std::string& text) {
  Rational r;
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      r.num = std::stoll(text);
    } else {
      r.num = std::stoll(text.substr(0, slash));
      r.den = std::stoll(text.substr(slash + 1));
    }
  } catch (const std::exception&) {
    throw ConfigError("invalid rational '" + text + "' in fractal descriptor");
  }
  if (r.den <= 0) throw ConfigError("rational denominators must be positive");
  return r;
}

std::string format(const Rational& r) {
  return r.den == 1 ? std::to_string(r.num) : std::to_string(r.num) + "/" + std::to_string(r.den);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

// Number of k in [0, 2^level) with [k, k+1] 2^-level meeting [p, q].
std::int64_t interval_count(const Rational& p, const Rational& q, int level) {
  const i128 scale = static_cast<i128>(1) << level;
  // k <= q 2^level and k + 1 >= p 2^level
  const i128 qn = q.num * scale;
  i128 hi = qn >= 0 ? qn / q.den : -((-qn + q.den - 1) / q.den);
  const i128 pn = p.num * scale;
  i128 lo = (pn >= 0 ? (pn + p.den - 1) / p.den : -((-pn) / p.den)) - 1;
  lo = std::max<i128>(lo, 0);
  hi = std::min<i128>(hi, scale - 1);
  return hi >= lo ? static_cast<std::int64_t>(hi - lo + 1) : 0;
}

std::int64_t cantor_count(int m, int depth, int level) {
  std::int64_t count = 0;
  std::vector<std::pair<std::int64_t, int>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [k, l] = stack.back();
    stack.pop_back();
    const auto [lo, hi] = dyadic_interval(k, l);
    if (!cantor_meets(m, depth, lo, hi)) continue;
    if (l == level) {
      ++count;
      continue;
    }
    stack.push_back({2 * k, l + 1});
    stack.push_back({2 * k + 1, l + 1});
  }
  return count;
}

}  // namespace

FractalSet FractalSet::point(Rational x, Rational y) {
  FractalSet f;
  f.kind_ = Kind::kPoint;
  f.a_ = x;
  f.b_ = y;
  return f;
}

FractalSet FractalSet::horizontal_segment(Rational y, Rational x0, Rational x1) {
  if (lt(frac(x1), frac(x0))) throw ConfigError("segment needs x0 <= x1");
  FractalSet f;
  f.kind_ = Kind::kHorizontalSegment;
  f.a_ = y;
  f.b_ = x0;
  f.c_ = x1;
  return f;
}

FractalSet FractalSet::square_boundary(Rational x0, Rational y0, Rational side) {
  if (side.num <= 0) throw ConfigError("square boundary needs a positive side");
  FractalSet f;
  f.kind_ = Kind::kSquareBoundary;
  f.a_ = x0;
  f.b_ = y0;
  f.c_ = side;
  return f;
}

FractalSet FractalSet::cantor_product(int inverse_ratio, int construction_depth) {
  if (inverse_ratio < 3) throw ConfigError("Cantor inverse ratio must be at least 3");
  FractalSet f;
  f.kind_ = Kind::kCantorProduct;
  f.m_ = inverse_ratio;
  f.depth_ = construction_depth < 0 ? default_depth(inverse_ratio) : construction_depth;
  if (f.depth_ > default_depth(inverse_ratio)) throw ConfigError("Cantor construction depth too large for exact arithmetic");
  return f;
}

FractalSet FractalSet::cantor_dust(int inverse_ratio, int construction_depth) {
  FractalSet f = cantor_product(inverse_ratio, construction_depth);
  f.kind_ = Kind::kCantorDust;
  return f;
}

FractalSet FractalSet::rational_grid(int max_denominator) {
  if (max_denominator < 1) throw ConfigError("rational grid needs a positive denominator bound");
  FractalSet f;
  f.kind_ = Kind::kRationalGrid;
  f.m_ = max_denominator;
  return f;
}

FractalSet FractalSet::parse(const std::string& descriptor) {
  const auto colon = descriptor.find(':');
  const std::string name = descriptor.substr(0, colon);
  const auto args = colon == std::string::npos ? std::vector<std::string>{} : split(descriptor.substr(colon + 1), ',');
  auto arg_int = [&](std::size_t i, int fallback) {
    if (i >= args.size()) return fallback;
    try {
      return std::stoi(args[i]);
    } catch (const std::exception&) {
      throw ConfigError("invalid integer '" + args[i] + "' in fractal descriptor");
    }
  };
  if (name == "point" && args.size() == 2) return point(parse_rational(args[0]), parse_rational(args[1]));
  if (name == "segment" && args.size() == 1) return horizontal_segment(parse_rational(args[0]));
  if (name == "segment" && args.size() == 3)
    return horizontal_segment(parse_rational(args[0]), parse_rational(args[1]), parse_rational(args[2]));
  if (name == "square-boundary" && args.size() == 3)
    return square_boundary(parse_rational(args[0]), parse_rational(args[1]), parse_rational(args[2]));
  if (name == "cantor-product" && args.size() <= 2) return cantor_product(arg_int(0, 3), arg_int(1, -1));
  if (name == "cantor-dust" && args.size() <= 2) return cantor_dust(arg_int(0, 3), arg_int(1, -1));
  if (name == "rational-grid" && args.size() == 1) return rational_grid(arg_int(0, 1));
  throw ConfigError("unrecognized fractal descriptor '" + descriptor + "'");
}

std::string FractalSet::descriptor() const {
  switch (kind_) {
    case Kind::kPoint: return "point:" + format(a_) + "," + format(b_);
    case Kind::kHorizontalSegment: return "segment:" + format(a_) + "," + format(b_) + "," + format(c_);
    case Kind::kSquareBoundary: return "square-boundary:" + format(a_) + "," + format(b_) + "," + format(c_);
    case Kind::kCantorProduct: return "cantor-product:" + std::to_string(m_) + "," + std::to_string(depth_);
    case Kind::kCantorDust: return "cantor-dust:" + std::to_string(m_) + "," + std::to_string(depth_);
    case Kind::kRationalGrid: return "rational-grid:" + std::to_string(m_);
  }
  return {};
}

double FractalSet::nominal_dimension() const {
  switch (kind_) {
    case Kind::kPoint:
    case Kind::kRationalGrid: return 0.0;
    case Kind::kHorizontalSegment:
    case Kind::kSquareBoundary: return 1.0;
    case Kind::kCantorProduct: return 1.0 + std::log(2.0) / std::log(static_cast<double>(m_));
    case Kind::kCantorDust: return 2.0 * std::log(2.0) / std::log(static_cast<double>(m_));
  }
  return 0.0;
}

bool FractalSet::intersects(const DyadicSquare& s) const {
  const auto [x0, x1] = dyadic_interval(s.ix, s.level);
  const auto [y0, y1] = dyadic_interval(s.iy, s.level);
  auto within = [](const Frac& lo, const Frac& v, const Frac& hi) { return le(lo, v) && le(v, hi); };
  switch (kind_) {
    case Kind::kPoint: return within(x0, frac(a_), x1) && within(y0, frac(b_), y1);
    case Kind::kHorizontalSegment:
      return within(y0, frac(a_), y1) && le(frac(b_), x1) && le(x0, frac(c_));
    case Kind::kSquareBoundary: {
      const Frac rx0 = frac(a_), ry0 = frac(b_);
      const Frac rx1{static_cast<i128>(a_.num) * c_.den + static_cast<i128>(c_.num) * a_.den, static_cast<i128>(a_.den) * c_.den};
      const Frac ry1{static_cast<i128>(b_.num) * c_.den + static_cast<i128>(c_.num) * b_.den, static_cast<i128>(b_.den) * c_.den};
      const bool meets = le(rx0, x1) && le(x0, rx1) && le(ry0, y1) && le(y0, ry1);
      const bool interior = lt(rx0, x0) && lt(x1, rx1) && lt(ry0, y0) && lt(y1, ry1);
      return meets && !interior;
    }
    case Kind::kCantorProduct:
    case Kind::kCantorDust: {
      if (depth_ < s.level + 2)
        throw ConfigError("Cantor construction depth " + std::to_string(depth_) + " too shallow for level " +
                          std::to_string(s.level));
      const bool x_hit = cantor_meets(m_, depth_, x0, x1);
      if (kind_ == Kind::kCantorProduct) return x_hit && le(y0, Frac{1, 1}) && le(Frac{0, 1}, y1);
      return x_hit && cantor_meets(m_, depth_, y0, y1);
    }
    case Kind::kRationalGrid: {
      // Some a/q in [x0, x1] and b/q in [y0, y1] with 0 <= a, b <= q.
      auto has_multiple = [](const Frac& lo, const Frac& hi, i128 q) {
        const i128 ln = lo.num * q, hn = hi.num * q;
        i128 first = ln >= 0 ? (ln + lo.den - 1) / lo.den : -((-ln) / lo.den);
        i128 last = hn >= 0 ? hn / hi.den : -((-hn + hi.den - 1) / hi.den);
        first = std::max<i128>(first, 0);
        last = std::min<i128>(last, q);
        return first <= last;
      };
      for (int q = 1; q <= m_; ++q)
        if (has_multiple(x0, x1, q) && has_multiple(y0, y1, q)) return true;
      return false;
    }
  }
  return false;
}

std::int64_t FractalSet::euclidean_count(int level) const {
  if (level < 0) throw DomainError("euclidean_count needs level >= 0");
  switch (kind_) {
    case Kind::kPoint: return interval_count(a_, a_, level) * interval_count(b_, b_, level);
    case Kind::kHorizontalSegment: return interval_count(b_, c_, level) * interval_count(a_, a_, level);
    case Kind::kCantorProduct: return cantor_count(m_, depth_, level) * interval_count({0, 1}, {1, 1}, level);
    case Kind::kCantorDust: {
      const auto c = cantor_count(m_, depth_, level);
      return c * c;
    }
    default: break;
  }
  std::int64_t count = 0;
  std::vector<DyadicSquare> stack{{0, 0, 0}};
  while (!stack.empty()) {
    const DyadicSquare s = stack.back();
    stack.pop_back();
    if (!intersects(s)) continue;
    if (s.level == level) {
      ++count;
      continue;
    }
    for (int k = 0; k < 4; ++k) stack.push_back(s.child(k));
  }
  return count;
}

QuantumCount quantum_count(const FractalSet& x, const Tiling& t) {
  QuantumCount q;
  for (const auto& c : t.squares) q.count += x.intersects(c.square) ? 1 : 0;
  for (const auto& c : t.unresolved) q.unresolved_hits += x.intersects(c.square) ? 1 : 0;
  return q;
}

}  // namespace lqg
