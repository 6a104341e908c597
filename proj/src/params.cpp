#include "lqg/params.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "lqg/error.hpp"

namespace lqg {

double gamma_from_q(double q) {
  if (!(q >= 2.0)) throw DomainError("gamma is only real for q >= 2");
  // 4 / (q + sqrt(q^2 - 4)) avoids the cancellation in q - sqrt(q^2 - 4).
  return 4.0 / (q + std::sqrt(q * q - 4.0));
}

Params params_from_q(double q) {
  if (!(q > 0.0) || !std::isfinite(q))
    throw DomainError("background charge q must be positive and finite, got " + std::to_string(q));
  Params p;
  p.q = q;
  p.c_m = 25.0 - 6.0 * q * q;
  if (q >= 2.0) p.gamma = gamma_from_q(q);
  return p;
}

Params params_from_cm(double c_m) {
  if (!(c_m < 25.0))
    throw DomainError("c_m must be < 25 (Q would be non-positive or zero), got " + std::to_string(c_m));
  Params p;
  p.c_m = c_m;
  p.q = std::sqrt((25.0 - c_m) / 6.0);
  if (c_m <= 1.0) p.gamma = gamma_from_q(std::max(p.q, 2.0));
  return p;
}

}  // namespace lqg
