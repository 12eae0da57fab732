#include <algorithm>
#include <string>

#include "points.hpp"

namespace stguide {

namespace detail {

std::vector<Eigen::VectorXd> resample(const std::vector<Eigen::VectorXd>& points, int k) {
  if (points.size() < 2) throw Error(ErrorCode::kTooFewPoints, "resampling needs at least 2 waypoints");
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "resampling needs k >= 2");

  std::vector<double> cumulative(points.size(), 0.0);
  for (std::size_t i = 1; i < points.size(); ++i) {
    cumulative[i] = cumulative[i - 1] + (points[i] - points[i - 1]).norm();
  }
  const double total = cumulative.back();
  if (!(total > 0.0)) throw Error(ErrorCode::kZeroLength, "trajectory has zero arc length");

  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(k));
  out.push_back(points.front());
  std::size_t segment = 1;
  for (int j = 1; j + 1 < k; ++j) {
    const double target = total * j / (k - 1);
    while (segment + 1 < points.size() && cumulative[segment] < target) ++segment;
    const double a = cumulative[segment - 1];
    const double b = cumulative[segment];
    const double t = b > a ? std::clamp((target - a) / (b - a), 0.0, 1.0) : 0.0;
    out.push_back(points[segment - 1] + t * (points[segment] - points[segment - 1]));
  }
  out.push_back(points.back());
  return out;
}

}  // namespace detail

Trajectory3D resample_uniform(const Trajectory3D& trajectory, int k) {
  return detail::to_trajectory3d(detail::resample(detail::to_vectors(trajectory), k), trajectory.frame);
}

Trajectory2D resample_uniform(const Trajectory2D& trajectory, int k) {
  return detail::to_trajectory2d(detail::resample(detail::to_vectors(trajectory), k));
}

}  // namespace stguide
