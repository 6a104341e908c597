#pragma once

#include <utility>
#include <vector>

namespace lqg {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;  // NaN with fewer than three points
  double r2 = 0.0;
};

/// Ordinary least squares y = intercept + slope x. Needs two distinct x values.
LineFit fit_line(const std::vector<std::pair<double, double>>& points);

/// Scaling exponent fitted on (log 1/epsilon, log value) points.
struct ExponentFit {
  double slope = 0.0;
  double stderr_slope = 0.0;
  double r2 = 0.0;
  std::vector<std::pair<double, double>> points;
  int censored = 0;
  int replicas = 0;
  /// At least three points and at most half the replicas censored.
  bool reportable = false;

  double censored_fraction() const { return replicas > 0 ? static_cast<double>(censored) / replicas : 0.0; }
};

ExponentFit fit_exponent(std::vector<std::pair<double, double>> points, int censored, int replicas);

double median(std::vector<double> values);

}  // namespace lqg
