#include "lqg/experiment.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "lqg/error.hpp"
#include "lqg/rng.hpp"

namespace lqg {

std::string to_string(Backend b) {
  switch (b) {
    case Backend::kExact: return "exact";
    case Backend::kOctave: return "octave";
    case Backend::kStub: return "stub";
  }
  return "unknown";
}

Backend backend_from_string(const std::string& name) {
  if (name == "exact") return Backend::kExact;
  if (name == "octave") return Backend::kOctave;
  if (name == "stub") return Backend::kStub;
  throw ConfigError("unknown backend '" + name + "' (expected exact, octave or stub)");
}

std::vector<double> Ladder::epsilons() const {
  if (!(epsilon0 > 0.0)) throw ConfigError("epsilon must be positive");
  if (steps < 0) throw ConfigError("ladder steps must be non-negative");
  if (replicas < 1) throw ConfigError("replicas must be at least 1");
  std::vector<double> out;
  for (int k = 0; k <= steps; ++k) out.push_back(std::ldexp(epsilon0, -k));
  return out;
}

FieldPtr make_field(const Campaign& c, std::uint64_t seed) {
  switch (c.backend) {
    case Backend::kStub: return constant_field(0.0);
    case Backend::kExact: return sample_exact({}, seed);
    case Backend::kOctave: return sample_octave(c.domain, std::max(c.depth_cap, c.domain.level), seed);
  }
  throw ConfigError("unknown backend");
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  const int threads = std::max(1, std::min(workers, n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (int i = next++; i < n && !failed; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
        failed = true;
      }
    }
  };
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

KpzPrediction kpz_exponent_prediction(const Params& p, double x) {
  if (!(x >= 0.0 && x <= 2.0)) throw DomainError("fractal dimension must lie in [0, 2]");
  KpzPrediction out;
  const double threshold = 0.5 * p.q * p.q;
  if (std::abs(x - threshold) <= 1e-12 * std::max(1.0, threshold)) {
    out.exponent = p.q;
    out.at_boundary = true;
  } else if (x > threshold) {
    out.exponent = std::numeric_limits<double>::infinity();
    out.infinite = true;
  } else {
    // Q - sqrt(Q^2 - 2x) written without cancellation for small x.
    out.exponent = 2.0 * x / (p.q + std::sqrt(p.q * p.q - 2.0 * x));
  }
  return out;
}

double dimension_guess(const Params& p) {
  if (!p.gamma) throw DomainError("the dimension guess needs c_m <= 1");
  return *p.gamma * p.q + *p.gamma / std::sqrt(6.0);
}

double watabiki_dimension(const Params& p) {
  if (!(p.c_m <= 1.0)) throw DomainError("the Watabiki formula needs c_m <= 1");
  const double a = std::sqrt(25.0 - p.c_m), b = std::sqrt(49.0 - p.c_m), c = std::sqrt(1.0 - p.c_m);
  return 2.0 * (a + b) / (a + c);
}

KpzResult run_kpz(const FractalSet& x, const Ladder& ladder, const Campaign& c) {
  const auto eps = ladder.epsilons();
  const auto n_eps = eps.size();
  const auto n_rep = static_cast<std::size_t>(ladder.replicas);
  KpzResult out;
  out.prediction = kpz_exponent_prediction(c.params, x.nominal_dimension());
  out.rows.resize(n_eps * n_rep);

  SubdivideOptions options;
  options.depth_cap = c.depth_cap;
  options.region = [&x](const DyadicSquare& s) { return x.intersects(s); };
  parallel_for(ladder.replicas, c.workers, [&](int r) {
    const auto field = make_field(c, derive_seed(ladder.base_seed, static_cast<std::uint64_t>(r)));
    for (std::size_t k = 0; k < n_eps; ++k) {
      const Tiling t = subdivide(c.domain, eps[k], *field, c.params, options);
      const auto q = quantum_count(x, t);
      out.rows[k * n_rep + static_cast<std::size_t>(r)] = {eps[k], r, q.count, q.unresolved_hits};
    }
  });

  std::vector<bool> censored(n_rep, false);
  out.unresolved_fraction.assign(n_eps, 0.0);
  for (std::size_t k = 0; k < n_eps; ++k) {
    for (std::size_t r = 0; r < n_rep; ++r) {
      if (out.rows[k * n_rep + r].unresolved_hits > 0) {
        censored[r] = true;
        out.unresolved_fraction[k] += 1.0 / static_cast<double>(n_rep);
      }
    }
  }
  int n_censored = 0;
  for (bool b : censored) n_censored += b ? 1 : 0;
  if (n_censored == ladder.replicas && !out.prediction.infinite) {
    std::ostringstream msg;
    msg << "every replica hit an unresolved cell; unresolved fraction per epsilon:";
    for (std::size_t k = 0; k < n_eps; ++k) msg << ' ' << eps[k] << ':' << out.unresolved_fraction[k];
    msg << " (raise the depth cap or coarsen epsilon)";
    throw ExperimentError(msg.str());
  }

  std::vector<std::pair<double, double>> points;
  for (std::size_t k = 0; k < n_eps; ++k) {
    double sum = 0.0;
    int used = 0;
    for (std::size_t r = 0; r < n_rep; ++r) {
      if (censored[r]) continue;
      sum += static_cast<double>(out.rows[k * n_rep + r].count);
      ++used;
    }
    if (used > 0 && sum > 0) points.emplace_back(std::log(1.0 / eps[k]), std::log(sum / used));
  }
  out.fit = fit_exponent(std::move(points), n_censored, ladder.replicas);

  if (n_eps >= 2) {
    for (std::size_t r = 0; r < n_rep; ++r) {
      if (censored[r]) continue;
      std::vector<std::pair<double, double>> pts;
      for (std::size_t k = 0; k < n_eps; ++k)
        if (out.rows[k * n_rep + r].count > 0)
          pts.emplace_back(std::log(1.0 / eps[k]), std::log(static_cast<double>(out.rows[k * n_rep + r].count)));
      if (pts.size() >= 2) out.replica_slopes.push_back(fit_line(pts).slope);
    }
  }
  return out;
}

MeasureResult run_measure(const FractalSet& x, const Ladder& ladder, const Campaign& c) {
  const auto prediction = kpz_exponent_prediction(c.params, x.nominal_dimension());
  if (prediction.infinite || prediction.at_boundary)
    throw DomainError("the rescaled count needs a fractal dimension below Q^2/2");
  MeasureResult out;
  out.exponent = prediction.exponent;
  out.counts = run_kpz(x, ladder, c);
  const auto eps = ladder.epsilons();
  const auto n_rep = static_cast<std::size_t>(ladder.replicas);
  std::vector<bool> censored(n_rep, false);
  for (const auto& row : out.counts.rows)
    if (row.unresolved_hits > 0) censored[static_cast<std::size_t>(row.replica)] = true;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    MeasureRow m{eps[k], 0.0, std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    int used = 0;
    for (std::size_t r = 0; r < n_rep; ++r) {
      if (censored[r]) continue;
      const double v = static_cast<double>(out.counts.rows[k * n_rep + r].count) * std::pow(eps[k], out.exponent);
      m.mean += v;
      m.min = std::min(m.min, v);
      m.max = std::max(m.max, v);
      ++used;
    }
    if (used == 0) continue;
    m.mean /= used;
    out.rows.push_back(m);
  }
  return out;
}

std::vector<int> geometric_radii(int r_min, int r_max) {
  if (r_min < 1 || r_max < r_min) throw ConfigError("radius range must satisfy 1 <= r_min <= r_max");
  std::vector<int> out;
  for (long r = 1; r <= r_max; r *= 2)
    if (r >= r_min) out.push_back(static_cast<int>(r));
  if (out.empty()) throw ConfigError("radius range contains no power of two");
  return out;
}

BallResult run_ball_growth(double epsilon, const std::vector<int>& radii, const Point& center, int replicas,
                           std::uint64_t base_seed, const Campaign& c) {
  if (radii.empty()) throw ConfigError("ball growth needs at least one radius");
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (radii[i] < 2 || (i > 0 && radii[i] <= radii[i - 1]))
      throw ConfigError("ball radii must be increasing and at least 2");
  if (replicas < 1) throw ConfigError("replicas must be at least 1");
  BallResult out;
  out.radii = radii;
  out.replicas = replicas;
  if (c.params.gamma) {
    out.dimension_guess = dimension_guess(c.params);
    out.watabiki = watabiki_dimension(c.params);
  }
  const int r_max = radii.back();
  std::vector<std::optional<BallProfile>> profiles(static_cast<std::size_t>(replicas));
  parallel_for(replicas, c.workers, [&](int r) {
    const auto field = make_field(c, derive_seed(base_seed, static_cast<std::uint64_t>(r)));
    LazyTiling t(c.domain, epsilon, field, c.params, c.depth_cap);
    if (t.locate(center).squares.empty()) return;
    auto p = ball_profile(t, center, r_max, c.node_budget);
    if (p.capped || static_cast<int>(p.counts.size()) <= r_max) return;
    profiles[static_cast<std::size_t>(r)] = std::move(p);
  });

  std::vector<std::vector<double>> exponents(radii.size());
  for (int r = 0; r < replicas; ++r) {
    const auto& p = profiles[static_cast<std::size_t>(r)];
    if (!p) {
      ++out.censored;
      continue;
    }
    for (std::size_t i = 0; i < radii.size(); ++i) {
      const int radius = radii[i];
      const auto count = p->counts[static_cast<std::size_t>(radius)];
      const bool truncated = p->truncated && p->truncation_radius < radius;
      out.rows.push_back({radius, r, count, truncated});
      exponents[i].push_back(std::log(static_cast<double>(count)) / std::log(static_cast<double>(radius)));
    }
  }
  for (auto& e : exponents) out.median_exponent.push_back(median(e));
  return out;
}

PtpResult run_ptp_distance(const Point& z, const Point& w, const Ladder& ladder, const Campaign& c) {
  if (z == w) throw DomainError("point-to-point distance needs distinct points");
  const auto eps = ladder.epsilons();
  const auto n_eps = eps.size();
  const auto n_rep = static_cast<std::size_t>(ladder.replicas);
  PtpResult out;
  out.rows.resize(n_eps * n_rep);
  parallel_for(ladder.replicas, c.workers, [&](int r) {
    const auto field = make_field(c, derive_seed(ladder.base_seed, static_cast<std::uint64_t>(r)));
    for (std::size_t k = 0; k < n_eps; ++k) {
      LazyTiling t(c.domain, eps[k], field, c.params, c.depth_cap);
      const auto d = distance(t, z, w, c.node_budget);
      PtpRow row{eps[k], r, -1, true};
      if (d.steps && !d.capped) row = {eps[k], r, *d.steps, false};
      out.rows[k * n_rep + static_cast<std::size_t>(r)] = row;
    }
  });

  std::vector<bool> censored(n_rep, false);
  for (const auto& row : out.rows)
    if (row.censored) censored[static_cast<std::size_t>(row.replica)] = true;
  int n_censored = 0;
  for (bool b : censored) n_censored += b ? 1 : 0;
  std::vector<std::pair<double, double>> points;
  for (std::size_t k = 0; k < n_eps; ++k) {
    double sum = 0.0;
    int used = 0;
    for (std::size_t r = 0; r < n_rep; ++r) {
      if (censored[r]) continue;
      sum += static_cast<double>(out.rows[k * n_rep + r].distance);
      ++used;
    }
    if (used > 0 && sum > 0) points.emplace_back(std::log(1.0 / eps[k]), std::log(sum / used));
  }
  out.fit = fit_exponent(std::move(points), n_censored, ladder.replicas);
  out.lower_bound = 1.0 / (2.0 + c.params.q) - 0.1;
  out.above_lower_bound = std::isfinite(out.fit.slope) && out.fit.slope >= out.lower_bound;
  return out;
}

}  // namespace lqg
