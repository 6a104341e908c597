#include "lqg/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lqg/error.hpp"

namespace lqg {

LineFit fit_line(const std::vector<std::pair<double, double>>& points) {
  const double n = static_cast<double>(points.size());
  if (points.size() < 2) throw DomainError("a line fit needs at least two points");
  double mx = 0, my = 0;
  for (const auto& [x, y] : points) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (sxx == 0.0) throw DomainError("a line fit needs two distinct abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0;
  for (const auto& [x, y] : points) {
    const double e = y - f.intercept - f.slope * x;
    sse += e * e;
  }
  f.r2 = syy > 0 ? 1.0 - sse / syy : 1.0;
  f.stderr_slope = points.size() > 2 ? std::sqrt(sse / (n - 2) / sxx) : std::numeric_limits<double>::quiet_NaN();
  return f;
}

ExponentFit fit_exponent(std::vector<std::pair<double, double>> points, int censored, int replicas) {
  ExponentFit fit;
  fit.censored = censored;
  fit.replicas = replicas;
  fit.slope = fit.stderr_slope = fit.r2 = std::numeric_limits<double>::quiet_NaN();
  if (points.size() >= 2) {
    const auto line = fit_line(points);
    fit.slope = line.slope;
    fit.stderr_slope = line.stderr_slope;
    fit.r2 = line.r2;
  }
  fit.reportable = points.size() >= 3 && 2 * censored <= replicas;
  fit.points = std::move(points);
  return fit;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

}  // namespace lqg
