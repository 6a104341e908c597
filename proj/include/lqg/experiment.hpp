#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lqg/fit.hpp"
#include "lqg/fractal.hpp"
#include "lqg/graph.hpp"

namespace lqg {

enum class Backend { kExact, kOctave, kStub };
std::string to_string(Backend b);
Backend backend_from_string(const std::string& name);

/// epsilon_k = epsilon0 2^-k for k = 0..steps; one field realization per replica.
struct Ladder {
  double epsilon0 = 1.0 / 64;
  int steps = 8;
  int replicas = 1;
  std::uint64_t base_seed = 0;

  std::vector<double> epsilons() const;
};

/// Settings shared by every campaign kind.
struct Campaign {
  Params params;
  Backend backend = Backend::kOctave;
  DyadicSquare domain{0, 0, 0};
  int depth_cap = 24;
  int workers = 1;
  std::size_t node_budget = 4'000'000;
};

/// Field for one replica; the stub backend is the constant 0.
FieldPtr make_field(const Campaign& c, std::uint64_t seed);

/// Calls fn(i) for i in [0, n) on up to `workers` threads. The first
/// exception thrown (lowest index) is rethrown after all work stops.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

struct KpzPrediction {
  double exponent = 0.0;
  bool infinite = false;
  bool at_boundary = false;
};

/// Q - sqrt(Q^2 - 2x) below x = Q^2/2, infinite above, Q with a flag at the boundary.
KpzPrediction kpz_exponent_prediction(const Params& p, double x);

/// gamma Q + gamma / sqrt(6); needs gamma.
double dimension_guess(const Params& p);
/// 2 (sqrt(25 - c) + sqrt(49 - c)) / (sqrt(25 - c) + sqrt(1 - c)); needs c_m <= 1.
double watabiki_dimension(const Params& p);

struct KpzRow {
  double epsilon = 0.0;
  int replica = 0;
  std::int64_t count = 0;
  std::int64_t unresolved_hits = 0;
};

struct KpzResult {
  std::vector<KpzRow> rows;  // epsilon-major, replica-minor
  KpzPrediction prediction;
  /// log of the replica-mean count against log 1/epsilon, over replicas
  /// without unresolved hits at any epsilon.
  ExponentFit fit;
  std::vector<double> unresolved_fraction;  // per epsilon
  std::vector<double> replica_slopes;       // per uncensored replica
};

KpzResult run_kpz(const FractalSet& x, const Ladder& ladder, const Campaign& c);

struct MeasureRow {
  double epsilon = 0.0;
  double mean = 0.0;  // mean over uncensored replicas of count * epsilon^exponent
  double min = 0.0;
  double max = 0.0;
};

struct MeasureResult {
  double exponent = 0.0;
  std::vector<MeasureRow> rows;
  KpzResult counts;
};

MeasureResult run_measure(const FractalSet& x, const Ladder& ladder, const Campaign& c);

struct BallRow {
  int radius = 0;
  int replica = 0;
  std::int64_t count = 0;
  bool truncated = false;
};

struct BallResult {
  std::vector<int> radii;
  std::vector<BallRow> rows;              // replica-major, radius-minor
  std::vector<double> median_exponent;    // per radius: median of log #B_r / log r
  int censored = 0;
  int replicas = 0;
  std::optional<double> dimension_guess;  // reference lines when gamma exists
  std::optional<double> watabiki;
};

/// 2^a for r_min <= 2^a <= r_max.
std::vector<int> geometric_radii(int r_min, int r_max);

/// Ball volumes around `center` on a lazily evaluated tiling at `epsilon`.
/// Replicas whose center is uncovered, or whose search exhausts the node
/// budget before the largest radius, are censored and emit no rows.
BallResult run_ball_growth(double epsilon, const std::vector<int>& radii, const Point& center, int replicas,
                           std::uint64_t base_seed, const Campaign& c);

struct PtpRow {
  double epsilon = 0.0;
  int replica = 0;
  std::int64_t distance = -1;  // -1 when censored
  bool censored = false;
};

struct PtpResult {
  std::vector<PtpRow> rows;  // epsilon-major, replica-minor
  ExponentFit fit;           // over replicas finite at every epsilon
  double lower_bound = 0.0;  // 1/(2+Q) - 0.1
  bool above_lower_bound = false;
};

PtpResult run_ptp_distance(const Point& z, const Point& w, const Ladder& ladder, const Campaign& c);

}  // namespace lqg
