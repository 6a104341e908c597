#include <doctest.h>

#include <bit>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "lqg/error.hpp"
#include "lqg/experiment.hpp"
#include "lqg/params.hpp"

using namespace lqg;

namespace {

Campaign stub_campaign(double q) {
  Campaign c;
  c.params = params_from_q(q);
  c.backend = Backend::kStub;
  c.depth_cap = 24;
  return c;
}

Campaign octave_campaign(double q, int depth_cap) {
  Campaign c;
  c.params = params_from_q(q);
  c.backend = Backend::kOctave;
  c.depth_cap = depth_cap;
  return c;
}

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

}  // namespace

TEST_CASE("KPZ prediction values") {
  const auto q2 = params_from_q(2.0);
  CHECK(kpz_exponent_prediction(q2, 0.0).exponent == 0.0);
  CHECK(kpz_exponent_prediction(q2, 1.0).exponent == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-15));
  CHECK(kpz_exponent_prediction(q2, 1.0).exponent == doctest::Approx(0.585786).epsilon(1e-6));
  const auto q1 = params_from_q(1.0);
  CHECK(kpz_exponent_prediction(q1, 1.0).infinite);
  CHECK(std::isinf(kpz_exponent_prediction(q1, 1.0).exponent));
  const auto edge = kpz_exponent_prediction(q1, 0.5);
  CHECK(edge.at_boundary);
  CHECK_FALSE(edge.infinite);
  CHECK(edge.exponent == 1.0);
  CHECK_THROWS_AS(kpz_exponent_prediction(q2, -0.1), DomainError);
  CHECK_THROWS_AS(kpz_exponent_prediction(q2, 2.1), DomainError);
}

TEST_CASE("KPZ prediction is increasing with the expected small-x series") {
  for (double q : {0.8, 1.2, 2.0, 2.5}) {
    const auto p = params_from_q(q);
    const double x = 1e-3;
    CHECK(std::abs(kpz_exponent_prediction(p, x).exponent - (x / q + x * x / (2 * q * q * q))) <= 1e-6);
    const double top = std::min(2.0, 0.5 * q * q);
    double previous = -1.0;
    for (int i = 0; i < 200; ++i) {
      const double xi = top * i / 200.0;
      const double e = kpz_exponent_prediction(p, xi).exponent;
      CHECK(e > previous);
      if (i > 0) CHECK(e - previous < 0.2);
      previous = e;
    }
  }
}

TEST_CASE("comparison dimensions") {
  const auto c0 = params_from_cm(0.0);
  CHECK(dimension_guess(c0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(watabiki_dimension(c0) == doctest::Approx(4.0).epsilon(1e-14));
  const auto c1 = params_from_cm(1.0);
  CHECK(watabiki_dimension(c1) == doctest::Approx(4.8284271247461901).epsilon(1e-14));
  CHECK(dimension_guess(c1) == doctest::Approx(4.816496580927726).epsilon(1e-7));
  const auto q25 = params_from_q(2.5);
  CHECK(dimension_guess(q25) == doctest::Approx(2.908248290463863).epsilon(1e-14));
  CHECK(watabiki_dimension(q25) == doctest::Approx(2.8507810593582122).epsilon(1e-14));
  CHECK_THROWS_AS(dimension_guess(params_from_q(1.5)), DomainError);
  CHECK_THROWS_AS(watabiki_dimension(params_from_q(1.5)), DomainError);
}

TEST_CASE("ladders") {
  const Ladder l{0.25, 3, 2, 9};
  CHECK(l.epsilons() == std::vector<double>{0.25, 0.125, 0.0625, 0.03125});
  CHECK_THROWS_AS((Ladder{0.0, 3, 1, 0}.epsilons()), ConfigError);
  CHECK_THROWS_AS((Ladder{0.1, 3, 0, 0}.epsilons()), ConfigError);
  CHECK(geometric_radii(4, 256) == std::vector<int>{4, 8, 16, 32, 64, 128, 256});
  CHECK(geometric_radii(5, 100) == std::vector<int>{8, 16, 32, 64});
  CHECK_THROWS_AS(geometric_radii(0, 8), ConfigError);
  CHECK_THROWS_AS(backend_from_string("gpu"), ConfigError);
  for (auto b : {Backend::kExact, Backend::kOctave, Backend::kStub}) CHECK(backend_from_string(to_string(b)) == b);
}

TEST_CASE("exponent fits report censoring") {
  const std::vector<std::pair<double, double>> line{{1, 2}, {2, 4}, {3, 6}};
  auto f = fit_exponent(line, 0, 4);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.reportable);
  CHECK(fit_exponent(line, 2, 4).reportable);
  CHECK_FALSE(fit_exponent(line, 3, 4).reportable);
  CHECK(fit_exponent(line, 3, 4).censored_fraction() == 0.75);
  CHECK_FALSE(fit_exponent({{1, 2}, {2, 4}}, 0, 4).reportable);
  CHECK(std::isnan(fit_exponent({}, 4, 4).slope));
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
}

TEST_CASE("parallel_for rethrows the lowest failing index") {
  std::vector<int> seen(50, 0);
  parallel_for(50, 4, [&](int i) { seen[static_cast<std::size_t>(i)] = i + 1; });
  for (int i = 0; i < 50; ++i) CHECK(seen[static_cast<std::size_t>(i)] == i + 1);
  try {
    parallel_for(8, 1, [](int i) {
      if (i >= 3) throw std::runtime_error("index " + std::to_string(i));
    });
    FAIL("no exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "index 3");
  }
}

TEST_CASE("zero field: segment count grows like 1/epsilon at Q = 1") {
  const auto r = run_kpz(FractalSet::horizontal_segment({1, 2}), {0.25, 6, 2, 1}, stub_campaign(1.0));
  CHECK(r.rows.size() == 14);
  CHECK(r.fit.slope == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.fit.censored == 0);
  CHECK(r.fit.reportable);
  for (double s : r.replica_slopes) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& row : r.rows) CHECK(row.count == static_cast<std::int64_t>(std::llround(2.0 / row.epsilon)));
}

TEST_CASE("all-censored subcritical campaign fails with diagnostics") {
  Campaign c = octave_campaign(2.0, 3);
  const Ladder l{std::ldexp(1.0, -14), 0, 3, 5};
  try {
    run_kpz(FractalSet::horizontal_segment({1, 2}), l, c);
    FAIL("no exception");
  } catch (const ExperimentError& e) {
    CHECK(std::string(e.what()).find("unresolved fraction") != std::string::npos);
  }
  // The supercritical regime reports the unresolved fraction instead of failing.
  const auto r = run_kpz(FractalSet::horizontal_segment({1, 2}), l, octave_campaign(1.0, 3));
  CHECK(r.prediction.infinite);
  CHECK(r.unresolved_fraction.back() == 1.0);
  CHECK_FALSE(r.fit.reportable);
}

TEST_CASE("campaign results do not depend on the worker count") {
  const auto x = FractalSet::horizontal_segment({1, 2});
  const Ladder l{1.0 / 64, 3, 5, 77};
  Campaign c = octave_campaign(1.8, 14);
  c.workers = 1;
  const auto a = run_kpz(x, l, c);
  c.workers = 3;
  const auto b = run_kpz(x, l, c);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].count == b.rows[i].count);
    CHECK(a.rows[i].unresolved_hits == b.rows[i].unresolved_hits);
  }
  CHECK(same_bits(a.fit.slope, b.fit.slope));
  CHECK(same_bits(a.fit.stderr_slope, b.fit.stderr_slope));

  Campaign d = octave_campaign(2.0, 16);
  d.workers = 1;
  const auto p1 = run_ptp_distance({0.25, 0.5}, {0.75, 0.5}, {1.0 / 32, 3, 3, 4}, d);
  d.workers = 2;
  const auto p2 = run_ptp_distance({0.25, 0.5}, {0.75, 0.5}, {1.0 / 32, 3, 3, 4}, d);
  for (std::size_t i = 0; i < p1.rows.size(); ++i) CHECK(p1.rows[i].distance == p2.rows[i].distance);
  CHECK(same_bits(p1.fit.slope, p2.fit.slope));
}

TEST_CASE("exact backend drives a small campaign") {
  Campaign c = octave_campaign(2.0, 8);
  c.backend = Backend::kExact;
  const auto r = run_kpz(FractalSet::horizontal_segment({1, 2}), {1.0 / 8, 2, 2, 3}, c);
  CHECK(r.rows.size() == 6);
  for (const auto& row : r.rows) CHECK(row.count > 0);
  const auto again = run_kpz(FractalSet::horizontal_segment({1, 2}), {1.0 / 8, 2, 2, 3}, c);
  for (std::size_t i = 0; i < r.rows.size(); ++i) CHECK(r.rows[i].count == again.rows[i].count);
}

TEST_CASE("unresolved fraction shrinks as Q grows") {
  const auto x = FractalSet::horizontal_segment({1, 2});
  const Ladder l{std::ldexp(1.0, -7), 0, 50, 2024};
  double previous = 2.0;
  for (double q : {0.8, 1.0, 1.2, 1.41, 1.6, 2.0}) {
    const auto r = run_kpz(x, l, octave_campaign(q, 9));
    CAPTURE(q);
    CHECK(r.unresolved_fraction[0] <= previous);
    previous = r.unresolved_fraction[0];
  }
  CHECK(previous < 1.0);
}

TEST_CASE("rescaled counts") {
  // Point: the rescaled count is the raw count.
  const auto pt = run_measure(FractalSet::point({1, 3}, {1, 3}), {0.25, 5, 1, 0}, stub_campaign(2.0));
  CHECK(pt.exponent == 0.0);
  for (const auto& row : pt.rows) CHECK((row.mean == 1.0 || row.mean == 2.0 || row.mean == 4.0));

  // Zero field, Q = 2: side epsilon^(1/2), so count * epsilon^(x/Q) stays within a lattice factor.
  const auto seg = run_kpz(FractalSet::horizontal_segment({1, 3}), {0.25, 8, 1, 0}, stub_campaign(2.0));
  double lo = 1e300, hi = 0;
  for (const auto& row : seg.rows) {
    const double v = static_cast<double>(row.count) * std::sqrt(row.epsilon);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi / lo <= 2.0);

  // Sampled field, Q = 2: the rescaled mean over the finer half of the ladder stays within a factor 8.
  const auto m = run_measure(FractalSet::horizontal_segment({1, 2}), {std::ldexp(1.0, -6), 6, 4, 11},
                             octave_campaign(2.0, 20));
  REQUIRE(m.rows.size() == 7);
  double mlo = 1e300, mhi = 0;
  for (std::size_t k = 3; k < m.rows.size(); ++k) {
    mlo = std::min(mlo, m.rows[k].mean);
    mhi = std::max(mhi, m.rows[k].mean);
    CHECK(m.rows[k].min <= m.rows[k].mean);
    CHECK(m.rows[k].mean <= m.rows[k].max);
  }
  CHECK(mhi / mlo <= 8.0);

  CHECK_THROWS_AS(run_measure(FractalSet::horizontal_segment({1, 2}), {0.25, 2, 1, 0}, stub_campaign(1.0)),
                  DomainError);
}

TEST_CASE("ball growth on the zero field approaches dimension two") {
  Campaign c = stub_campaign(2.0);
  c.depth_cap = 14;
  const Point center(0.5 + 1.0 / 3000, 0.5 + 1.0 / 7000);
  const auto r = run_ball_growth(std::ldexp(1.0, -20), geometric_radii(4, 256), center, 2, 1, c);
  CHECK(r.censored == 0);
  CHECK(r.rows.size() == 14);
  for (std::size_t i = 1; i < r.median_exponent.size(); ++i) CHECK(r.median_exponent[i] < r.median_exponent[i - 1]);
  CHECK(std::abs(r.median_exponent.back() - 2.0) <= 0.15);
  for (const auto& row : r.rows) CHECK(row.count == 2 * std::int64_t{row.radius} * row.radius + 2 * row.radius + 1);
  CHECK(r.dimension_guess.has_value());

  const auto out = run_ball_growth(std::ldexp(1.0, -20), {4, 8}, {1.5, 0.5}, 3, 1, c);
  CHECK(out.censored == 3);
  CHECK(out.rows.empty());
  CHECK_FALSE(run_ball_growth(1e-3, {4, 8}, center, 1, 1, stub_campaign(1.5)).dimension_guess.has_value());
}

TEST_CASE("point-to-point distance on the zero field scales like 1/epsilon") {
  const auto r = run_ptp_distance({0.25, 0.5}, {0.75, 0.5}, {1.0 / 32, 5, 1, 0}, stub_campaign(1.0));
  CHECK(r.fit.slope == doctest::Approx(1.0).epsilon(0.02));
  CHECK(r.lower_bound == doctest::Approx(1.0 / 3 - 0.1));
  CHECK(r.above_lower_bound);
  for (const auto& row : r.rows) CHECK(row.distance == std::llround(0.5 / row.epsilon) - 1);
  CHECK_THROWS_AS(run_ptp_distance({0.3, 0.3}, {0.3, 0.3}, {0.1, 1, 1, 0}, stub_campaign(1.0)), DomainError);
}
