#pragma once

#include <optional>

namespace lqg {

/// Matter central charge, background charge and (for c_m <= 1) the coupling.
struct Params {
  double c_m = 1.0;
  double q = 2.0;
  std::optional<double> gamma;  // only when c_m <= 1, in (0, 2]

  bool subcritical() const { return q >= 2.0; }
  bool operator==(const Params&) const = default;
};

/// c_m = 25 - 6 q^2, gamma the root of q = 2/gamma + gamma/2 in (0, 2].
Params params_from_cm(double c_m);
Params params_from_q(double q);

/// Smaller root of 2/gamma + gamma/2 = q; requires q >= 2.
double gamma_from_q(double q);

}  // namespace lqg
