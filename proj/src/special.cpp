#include "lqg/special.hpp"

#include <cmath>
#include <limits>

#include "lqg/error.hpp"

namespace lqg {
namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

double e1_series(double x) {
  // E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
  double sum = 0.0;
  double term = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= -x / k;
    const double contrib = term / k;
    sum += contrib;
    if (std::abs(contrib) < 1e-17 * std::abs(sum)) break;
  }
  return -kEulerGamma - std::log(x) - sum;
}

double e1_continued_fraction(double x) {
  // E1(x) = e^{-x} / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...)))
  constexpr double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double a = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x);
}

}  // namespace

double expint_e1(double x) {
  if (!(x > 0.0)) throw DomainError("E1 requires a positive argument");
  if (x > 745.0) return 0.0;
  return x < 1.0 ? e1_series(x) : e1_continued_fraction(x);
}

double expint_e1_difference(double a, double b) {
  if (!(a > 0.0) || b < a) throw DomainError("E1 difference requires 0 < a <= b");
  if (a == b) return 0.0;
  return expint_e1(a) - expint_e1(b);
}

}  // namespace lqg

namespace lqg {
namespace {

template <class F>
double simpson(const F& f, double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double heat_kernel_integral(double r, double tau, double tol) {
  if (!(tau > 0.0 && tau <= 1.0)) throw DomainError("heat kernel integral needs tau in (0, 1]");
  // With s = e^u the integrand e^{-r^2/(2s)}/s ds becomes e^{-r^2 e^{-u}/2} du.
  const double half_r2 = 0.5 * r * r;
  auto f = [half_r2](double u) { return std::exp(-half_r2 * std::exp(-u)); };
  const double a = std::log(tau), b = 0.0;
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return 0.5 * simpson(f, a, b, fa, fm, fb, whole, tol, 50);
}

}  // namespace lqg
