#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <list>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lqg/dyadic.hpp"

namespace lqg {

/// A (center, radius) pair at which the field is observed. For a dyadic
/// square S the node is (v_S, |S|/2).
struct FieldNode {
  Point center = Point::Zero();
  double scale = 1.0;

  static FieldNode of(const DyadicSquare& s) { return {s.center(), 0.5 * s.side()}; }
  bool operator==(const FieldNode& o) const { return center == o.center && scale == o.scale; }
};

struct FieldNodeHash {
  std::size_t operator()(const FieldNode& n) const noexcept;
};

/// Value returned at the exact center of a log singularity.
inline constexpr double kSingularValue = std::numeric_limits<double>::infinity();

/// Whole-plane GFF covariance log(|z|_+ |w|_+ / |z - w|), |z|_+ = max(|z|, 1).
double wp_gff_covariance(const Point& z, const Point& w);

/// Covariance of the white-noise field h_t(z) at two nodes:
///   1/2 (E1(r^2/2) - E1(r^2/(2 tau))),  tau = max(t_a, t_b)^2,
/// and log(1 / max(t_a, t_b)) on the diagonal r = 0.
double wn_covariance(const FieldNode& a, const FieldNode& b);

/// Covariance of one octave layer h_{2^-n-1} - h_{2^-n} at separation r.
double octave_layer_covariance(int layer, double r);

/// Seeded Gaussian field oracle. Values are memoized (or reproducible by
/// construction) so repeated queries of a node are bit-identical. Queries are
/// serialized internally; a realization may be shared between readers.
class FieldRealization {
 public:
  virtual ~FieldRealization() = default;

  double operator()(const FieldNode& node) const;
  double value(const FieldNode& node) const { return (*this)(node); }

  const std::string& backend() const { return backend_; }
  std::uint64_t seed() const { return seed_; }
  /// Backend name plus seed, e.g. "octave:7".
  std::string id() const;
  std::size_t cached_nodes() const;

 protected:
  FieldRealization(std::string backend, std::uint64_t seed, bool memoize);
  virtual double evaluate(const FieldNode& node) const = 0;
  /// Store a precomputed value; only valid before the first query.
  void preload(const FieldNode& node, double value);

 private:
  std::string backend_;
  std::uint64_t seed_;
  bool memoize_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<FieldNode, double, FieldNodeHash> cache_;
};

using FieldPtr = std::shared_ptr<const FieldRealization>;

/// Deterministic stubs.
FieldPtr constant_field(double value = 0.0);
FieldPtr function_field(std::function<double(const FieldNode&)> fn, std::string name = "function-stub");

/// base(node) + alpha log(1/|v - z0|); kSingularValue at v == z0.
FieldPtr with_log_singularity(FieldPtr base, double alpha, const Point& z0);

/// The field h(. / C): node (v, t) maps to base(v / C, t / C). C must be a power of two.
FieldPtr rescaled(FieldPtr base, double factor);

// --- exact backend ---------------------------------------------------------

struct ExactOptions {
  std::size_t max_nodes = 4096;
};

/// Centered Gaussian vector with covariance wn_covariance, sampled by a
/// Cholesky factor with diagonal jitter escalation 1e-12 .. 1e-8. Nodes that
/// were not in the construction list are drawn lazily, conditionally on all
/// earlier nodes, by appending a row to the factor.
class ExactField final : public FieldRealization {
 public:
  ExactField(std::span<const FieldNode> nodes, std::uint64_t seed, ExactOptions options);

  std::size_t size() const { return nodes_.size() + zero_nodes_; }
  double jitter() const { return jitter_; }

 protected:
  double evaluate(const FieldNode& node) const override;

 private:
  double append(const FieldNode& node) const;
  double noise(std::size_t index) const;

  ExactOptions options_;
  mutable std::vector<FieldNode> nodes_;               // positive-variance nodes in factor order
  mutable std::vector<std::vector<double>> factor_;    // lower-triangular rows
  mutable std::vector<double> noise_;
  mutable std::size_t zero_nodes_ = 0;
  double jitter_ = 0.0;
};

std::shared_ptr<const ExactField> sample_exact(std::span<const FieldNode> nodes, std::uint64_t seed,
                                               ExactOptions options = {});

// --- octave backend --------------------------------------------------------

/// Discrete square-root kernel shared by every octave layer. Layer n lives on
/// the lattice 2^{-n-2} Z^2 where its covariance, in lattice units, does not
/// depend on n; the kernel is obtained by circulant spectral synthesis on a
/// periodic grid and truncated to a (2R+1)^2 stencil.
struct OctaveKernel {
  int radius = 8;
  int period = 256;
  std::vector<double> taps;  // row-major (2R+1)^2, taps[(dx+R)(2R+1) + dy+R]
  double negative_mass_fraction = 0.0;
  double tap(int dx, int dy) const { return taps[(dx + radius) * (2 * radius + 1) + (dy + radius)]; }
};

/// Built on first use; throws NumericError if the negative spectral mass
/// exceeds 1e-6 of the total.
const OctaveKernel& octave_kernel();

struct OctaveOptions {
  int max_depth = 40;
  /// Lattice points per tile edge. Fine layers are queried sparsely, so
  /// they use smaller tiles from layer `fine_from` on.
  int tile = 48;
  int fine_tile = 16;
  int fine_from = 8;
  /// Least recently used tiles beyond this count are dropped and resynthesized on demand.
  std::size_t max_tiles = 65536;
};

/// Sum of independent stationary octave layers, evaluated lazily tile by
/// tile from counter-based white noise. Values depend only on (seed, node),
/// never on query order.
class OctaveField final : public FieldRealization {
 public:
  OctaveField(const DyadicSquare& window, int depth, std::uint64_t seed, OctaveOptions options);

  const DyadicSquare& window() const { return window_; }
  int depth() const { return depth_; }
  /// Value of layer `layer` at lattice point (i, j) of 2^{-layer-2} Z^2.
  double layer_value(int layer, std::int64_t i, std::int64_t j) const;
  std::size_t tiles() const { return tiles_.size(); }
  /// Tiles synthesized so far, counting resynthesis after eviction.
  std::size_t synthesized() const { return synthesized_; }

 protected:
  double evaluate(const FieldNode& node) const override;

 private:
  struct TileKey {
    int layer;
    std::int64_t tx, ty;
    bool operator==(const TileKey&) const = default;
  };
  struct TileKeyHash {
    std::size_t operator()(const TileKey& k) const noexcept;
  };
  const std::vector<double>& tile(const TileKey& key) const;
  int tile_size(int layer) const { return layer < options_.fine_from ? options_.tile : options_.fine_tile; }
  std::vector<double> synthesize(const TileKey& key) const;
  double layer_at(int layer, double x, double y) const;

  DyadicSquare window_;
  int depth_;
  OctaveOptions options_;
  using Entry = std::pair<TileKey, std::vector<double>>;
  mutable std::list<Entry> lru_;
  mutable std::unordered_map<TileKey, std::list<Entry>::iterator, TileKeyHash> tiles_;
  mutable std::size_t synthesized_ = 0;
  mutable std::vector<std::pair<TileKey, const std::vector<double>*>> last_;
};

std::shared_ptr<const OctaveField> sample_octave(const DyadicSquare& window, int depth, std::uint64_t seed,
                                                 OctaveOptions options = {});

}  // namespace lqg
