#include <doctest.h>

#include <cmath>

#include "lqg/error.hpp"
#include "lqg/params.hpp"
#include "lqg/special.hpp"

using namespace lqg;

namespace {
// Bisection on 2/g + g/2 = q over (0, 2].
double gamma_by_bisection(double q) {
  double lo = 1e-12, hi = 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (2.0 / mid + mid / 2.0 > q ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}
}  // namespace

TEST_CASE("central charge and background charge determine each other") {
  CHECK(params_from_cm(1.0).q == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(params_from_cm(19.0).q == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(params_from_cm(0.0).q == doctest::Approx(2.0412414523193151).epsilon(1e-15));
  for (double q : {0.3, 0.9, 1.0, 1.7, 2.0, 2.5, 4.0}) CHECK(params_from_q(q).c_m == doctest::Approx(25 - 6 * q * q));
  CHECK_THROWS_AS(params_from_cm(25.0), DomainError);
  CHECK_THROWS_AS(params_from_cm(30.0), DomainError);
  CHECK_THROWS_AS(params_from_q(0.0), DomainError);
}

TEST_CASE("the coupling exists exactly for c_m <= 1") {
  CHECK_FALSE(params_from_q(1.5).gamma.has_value());
  CHECK_FALSE(params_from_q(1.5).subcritical());
  REQUIRE(params_from_q(2.0).gamma.has_value());
  CHECK(*params_from_q(2.0).gamma == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(*params_from_cm(0.0).gamma == doctest::Approx(1.6329931618554521).epsilon(1e-14));
  CHECK(*params_from_cm(-2.0).gamma == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  for (double q : {2.0001, 2.1, 2.5, 3.0, 5.0, 10.0}) {
    CHECK(gamma_from_q(q) == doctest::Approx(gamma_by_bisection(q)).epsilon(1e-12));
    const double g = gamma_from_q(q);
    CHECK(2.0 / g + g / 2.0 == doctest::Approx(q).epsilon(1e-14));
  }
  CHECK_THROWS_AS(gamma_from_q(1.9), DomainError);
}

TEST_CASE("exponential integral matches high-precision reference values") {
  // Reference values computed once at 30 digits and frozen here.
  CHECK(expint_e1(0.01) == doctest::Approx(4.0379295765381138).epsilon(1e-13));
  CHECK(expint_e1(0.5) == doctest::Approx(0.55977359477616081).epsilon(1e-13));
  CHECK(expint_e1(1.0) == doctest::Approx(0.21938393439552027).epsilon(1e-13));
  CHECK(expint_e1(2.0) == doctest::Approx(0.048900510708061120).epsilon(1e-13));
  CHECK(expint_e1(10.0) == doctest::Approx(4.1569689296853243e-6).epsilon(1e-12));
  CHECK(expint_e1(30.0) == doctest::Approx(3.0215520106888125e-15).epsilon(1e-11));
  CHECK(0.5 * expint_e1_difference(0.005, 0.02) == doctest::Approx(0.68569383763736676).epsilon(1e-14));
  CHECK_THROWS_AS(expint_e1(0.0), DomainError);
}
