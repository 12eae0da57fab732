#include <cmath>
#include <limits>

#include "stguide/geometry.hpp"

namespace stguide {

namespace {

std::optional<double> nearest_valid(const DepthMap& depth, const Pixel& p, double radius) {
  const int x_lo = static_cast<int>(std::floor(p.u - radius));
  const int x_hi = static_cast<int>(std::ceil(p.u + radius));
  const int y_lo = static_cast<int>(std::floor(p.v - radius));
  const int y_hi = static_cast<int>(std::ceil(p.v + radius));
  double best_d2 = std::numeric_limits<double>::infinity();
  std::optional<double> best;
  // Row-major scan with strict improvement: ties go to the first pixel.
  for (int y = y_lo; y <= y_hi; ++y) {
    for (int x = x_lo; x <= x_hi; ++x) {
      if (!depth.contains(x, y) || !valid_depth(depth.at(x, y))) continue;
      const double du = x - p.u;
      const double dv = y - p.v;
      const double d2 = du * du + dv * dv;
      if (d2 <= radius * radius && d2 < best_d2) {
        best_d2 = d2;
        best = depth.at(x, y);
      }
    }
  }
  return best;
}

}  // namespace

std::optional<double> sample_depth(const DepthMap& depth, const Pixel& p,
                                   const DepthLookupOptions& options) {
  if (!std::isfinite(p.u) || !std::isfinite(p.v)) return std::nullopt;
  const int x0 = static_cast<int>(std::floor(p.u));
  const int y0 = static_cast<int>(std::floor(p.v));
  const double fx = p.u - x0;
  const double fy = p.v - y0;

  const int xs[4] = {x0, x0 + 1, x0, x0 + 1};
  const int ys[4] = {y0, y0, y0 + 1, y0 + 1};
  const double ws[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};

  int valid = 0;
  double weight_sum = 0.0;
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    if (!depth.contains(xs[i], ys[i])) continue;
    const double z = depth.at(xs[i], ys[i]);
    if (!valid_depth(z)) continue;
    ++valid;
    weight_sum += ws[i];
    acc += ws[i] * z;
  }
  if (valid >= 2 && weight_sum > 0.0) {
    return acc / weight_sum;
  }
  return nearest_valid(depth, p, options.fallback_radius);
}

}  // namespace stguide
