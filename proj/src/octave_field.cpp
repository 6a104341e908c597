#define EIGEN_FFTW_DEFAULT
#include <unsupported/Eigen/FFT>

#include <array>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <mutex>
#include <set>

#include "lqg/error.hpp"
#include "lqg/field.hpp"
#include "lqg/rng.hpp"
#include "lqg/special.hpp"

namespace lqg {
namespace {

using Complex = std::complex<double>;

// FFTW picks SIMD codelets by buffer alignment. Forcing one alignment for
// every buffer keeps transforms bit-identical across threads.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) {}
  T* allocate(std::size_t n) {
    const std::size_t bytes = ((n * sizeof(T) + 63) / 64) * 64;
    if (void* p = std::aligned_alloc(64, bytes)) return static_cast<T*>(p);
    throw std::bad_alloc();
  }
  void deallocate(T* p, std::size_t) { std::free(p); }
  template <class U>
  bool operator==(const AlignedAllocator<U>&) const { return true; }
};
using ComplexGrid = std::vector<Complex, AlignedAllocator<Complex>>;

// In-place 2D transform of an n x n row-major array; the inverse is normalized.
void fft2(ComplexGrid& data, int n, bool inverse) {
  thread_local Eigen::FFT<double> fft;
  thread_local std::set<std::pair<int, bool>> planned;
  thread_local ComplexGrid out;
  out.resize(data.size());
  auto run = [&] {
    if (inverse)
      fft.impl().inv2(out.data(), data.data(), n, n);
    else
      fft.impl().fwd2(out.data(), data.data(), n, n);
  };
  if (planned.insert({n, inverse}).second) {
    static std::mutex planner;  // the FFTW planner is not thread-safe
    std::lock_guard lock(planner);
    run();
  } else {
    run();
  }
  const double norm = inverse ? 1.0 / (static_cast<double>(n) * n) : 1.0;
  for (std::size_t k = 0; k < data.size(); ++k) data[k] = out[k] * norm;
}

// Layer covariance in lattice units: the lattice spacing is a quarter of the
// layer's natural scale.
double lattice_covariance(double dx, double dy) {
  const double r2 = (dx * dx + dy * dy) / 16.0;
  if (r2 == 0.0) return std::log(2.0);
  return 0.5 * expint_e1_difference(0.5 * r2, 2.0 * r2);
}

OctaveKernel build_kernel() {
  OctaveKernel k;
  const int p = k.period;
  ComplexGrid grid(static_cast<std::size_t>(p) * p);
  for (int a = 0; a < p; ++a) {
    const int da = std::min(a, p - a);
    for (int b = 0; b < p; ++b) {
      const int db = std::min(b, p - b);
      grid[a * p + b] = lattice_covariance(da, db);
    }
  }
  fft2(grid, p, false);
  double negative = 0.0, total = 0.0;
  for (auto& v : grid) {
    const double lambda = v.real();
    total += std::abs(lambda);
    if (lambda < 0.0) negative -= lambda;
    v = std::sqrt(std::max(lambda, 0.0));
  }
  k.negative_mass_fraction = negative / total;
  if (k.negative_mass_fraction > 1e-6)
    throw NumericError("octave layer spectrum has negative mass beyond tolerance; increase padding");
  fft2(grid, p, true);
  const int r = k.radius;
  k.taps.resize(static_cast<std::size_t>(2 * r + 1) * (2 * r + 1));
  for (int dx = -r; dx <= r; ++dx)
    for (int dy = -r; dy <= r; ++dy)
      k.taps[(dx + r) * (2 * r + 1) + (dy + r)] = grid[((dx + p) % p) * p + (dy + p) % p].real();
  return k;
}

struct TileSpectrum {
  int size = 0;
  ComplexGrid values;
};

const TileSpectrum& tile_spectrum(int tile) {
  static std::mutex mutex;
  static std::unordered_map<int, TileSpectrum> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(tile);
  if (it != cache.end()) return it->second;
  const auto& kernel = octave_kernel();
  const int r = kernel.radius;
  TileSpectrum s;
  s.size = ((tile + 2 * r + 31) / 32) * 32;
  const int m = s.size;
  s.values.assign(static_cast<std::size_t>(m) * m, Complex(0.0));
  for (int dx = -r; dx <= r; ++dx)
    for (int dy = -r; dy <= r; ++dy) s.values[((dx + m) % m) * m + (dy + m) % m] = kernel.tap(dx, dy);
  fft2(s.values, m, false);
  return cache.emplace(tile, std::move(s)).first->second;
}

bool is_integer(double v) { return v == std::floor(v); }

}  // namespace

const OctaveKernel& octave_kernel() {
  static const OctaveKernel kernel = build_kernel();
  return kernel;
}

std::size_t OctaveField::TileKeyHash::operator()(const TileKey& k) const noexcept {
  std::uint64_t h = static_cast<std::uint64_t>(k.layer) * 0x9E3779B97F4A7C15ULL;
  h ^= static_cast<std::uint64_t>(k.tx) * 0xC2B2AE3D27D4EB4FULL + (h << 6) + (h >> 2);
  h ^= static_cast<std::uint64_t>(k.ty) * 0x165667B19E3779F9ULL + (h << 6) + (h >> 2);
  return static_cast<std::size_t>(h ^ (h >> 31));
}

OctaveField::OctaveField(const DyadicSquare& window, int depth, std::uint64_t seed, OctaveOptions options)
    : FieldRealization("octave-fft", seed, false), window_(window), depth_(depth), options_(options) {
  if (depth > options_.max_depth)
    throw CapacityError("octave depth " + std::to_string(depth) + " exceeds the configured maximum " +
                        std::to_string(options_.max_depth));
  if (depth < window.level) throw DomainError("octave depth must not be coarser than the window");
  if (options_.tile <= 0 || options_.fine_tile <= 0 || options_.tile % 4 != 0 || options_.fine_tile % 4 != 0)
    throw ConfigError("octave tile sizes must be positive multiples of 4");
  if (options_.max_tiles == 0) throw ConfigError("octave tile cache needs room for at least one tile");
  octave_kernel();
  last_.assign(static_cast<std::size_t>(std::max(depth_ + 1, 1)), {TileKey{-1, 0, 0}, nullptr});
}

std::vector<double> OctaveField::synthesize(const TileKey& key) const {
  const int t = tile_size(key.layer);
  const auto& spec = tile_spectrum(t);
  const int r = octave_kernel().radius;
  const int m = spec.size;
  const int span = t + 2 * r;
  const std::int64_t i0 = key.tx * t - r;
  const std::int64_t j0 = key.ty * t - r;

  ComplexGrid work(static_cast<std::size_t>(m) * m, Complex(0.0));
  for (int a = 0; a < span; ++a) {
    const auto i = static_cast<std::uint64_t>(i0 + a);
    std::int64_t block = std::numeric_limits<std::int64_t>::min();
    std::array<double, 4> normals{};
    for (int b = 0; b < span; ++b) {
      const std::int64_t j = j0 + b;
      if ((j >> 2) != block) {
        block = j >> 2;
        normals = normal4(seed(), Stream::kOctaveNoise,
                          {i, static_cast<std::uint64_t>(block), static_cast<std::uint64_t>(key.layer), 0});
      }
      work[a * m + b] = normals[static_cast<std::size_t>(j & 3)];
    }
  }
  fft2(work, m, false);
  for (std::size_t k = 0; k < work.size(); ++k) work[k] *= spec.values[k];
  fft2(work, m, true);

  std::vector<double> out(static_cast<std::size_t>(t) * t);
  for (int a = 0; a < t; ++a)
    for (int b = 0; b < t; ++b) out[a * t + b] = work[(a + r) * m + (b + r)].real();
  return out;
}

const std::vector<double>& OctaveField::tile(const TileKey& key) const {
  auto& last = last_[static_cast<std::size_t>(key.layer)];
  if (last.second && last.first == key) return *last.second;
  auto it = tiles_.find(key);
  if (it != tiles_.end()) {
    lru_.splice(lru_.begin(), lru_, it->second);
  } else {
    if (tiles_.size() >= options_.max_tiles) {
      const TileKey& victim = lru_.back().first;
      auto& cached = last_[static_cast<std::size_t>(victim.layer)];
      if (cached.second && cached.first == victim) cached = {TileKey{-1, 0, 0}, nullptr};
      tiles_.erase(victim);
      lru_.pop_back();
    }
    lru_.emplace_front(key, synthesize(key));
    it = tiles_.emplace(key, lru_.begin()).first;
    ++synthesized_;
  }
  last = {key, &it->second->second};
  return it->second->second;
}

double OctaveField::layer_value(int layer, std::int64_t i, std::int64_t j) const {
  if (layer < 0 || layer > depth_) throw DomainError("octave layer out of range");
  const int t = tile_size(layer);
  // Tiles need not be powers of two; use floor division.
  auto floor_div = [t](std::int64_t v) { return v >= 0 ? v / t : -((-v + t - 1) / t); };
  const TileKey key{layer, floor_div(i), floor_div(j)};
  const auto& values = tile(key);
  const std::int64_t a = i - key.tx * t, b = j - key.ty * t;
  return values[a * t + b];
}

double OctaveField::layer_at(int layer, double x, double y) const {
  const double gx = std::ldexp(x, layer + 2);
  const double gy = std::ldexp(y, layer + 2);
  if (is_integer(gx) && is_integer(gy))
    return layer_value(layer, static_cast<std::int64_t>(gx), static_cast<std::int64_t>(gy));
  const double fx0 = std::floor(gx), fy0 = std::floor(gy);
  const double wx = gx - fx0, wy = gy - fy0;
  const auto i = static_cast<std::int64_t>(fx0), j = static_cast<std::int64_t>(fy0);
  return (1.0 - wx) * ((1.0 - wy) * layer_value(layer, i, j) + wy * layer_value(layer, i, j + 1)) +
         wx * ((1.0 - wy) * layer_value(layer, i + 1, j) + wy * layer_value(layer, i + 1, j + 1));
}

double OctaveField::evaluate(const FieldNode& node) const {
  int e = 0;
  if (!(node.scale > 0.0) || std::frexp(node.scale, &e) != 0.5)
    throw DomainError("octave backend needs a dyadic scale 2^-m");
  if (node.scale >= 1.0) return 0.0;
  const int levels = 1 - e;  // scale = 2^-levels
  if (levels > depth_ + 1)
    throw CapacityError("query scale 2^-" + std::to_string(levels) + " is finer than the synthesized depth " +
                        std::to_string(depth_));
  const Point& v = node.center;
  if (!(v.x() >= window_.x0() && v.x() <= window_.x1() && v.y() >= window_.y0() && v.y() <= window_.y1()))
    throw DomainError("query point lies outside the octave window");
  double sum = 0.0;
  for (int n = 0; n < levels; ++n) sum += layer_at(n, v.x(), v.y());
  return sum;
}

std::shared_ptr<const OctaveField> sample_octave(const DyadicSquare& window, int depth, std::uint64_t seed,
                                                 OctaveOptions options) {
  return std::make_shared<OctaveField>(window, depth, seed, options);
}

}  // namespace lqg
