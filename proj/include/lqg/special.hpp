#pragma once

namespace lqg {

/// Exponential integral E1(x) = int_x^inf e^{-u}/u du for x > 0.
/// Power series below 1, Lentz continued fraction above; absolute error < 1e-12.
double expint_e1(double x);

/// E1(a) - E1(b) for 0 < a <= b.
double expint_e1_difference(double a, double b);

}  // namespace lqg

namespace lqg {

/// 1/2 int_tau^1 e^{-r^2/(2s)} / s ds by adaptive Simpson in log s, to
/// absolute tolerance `tol`. Independent of the closed form through E1.
double heat_kernel_integral(double r, double tau, double tol = 1e-12);

}  // namespace lqg
