#pragma once

#include <vector>

#include "stguide/trajectory.hpp"

namespace stguide::detail {

inline std::vector<Eigen::VectorXd> to_vectors(const Trajectory3D& t) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(t.waypoints.size());
  for (const Point3& p : t.waypoints) out.push_back(Eigen::Vector3d(p.x, p.y, p.z));
  return out;
}

inline std::vector<Eigen::VectorXd> to_vectors(const Trajectory2D& t) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(t.waypoints.size());
  for (const Pixel& p : t.waypoints) out.push_back(Eigen::Vector2d(p.u, p.v));
  return out;
}

inline Trajectory3D to_trajectory3d(const std::vector<Eigen::VectorXd>& points, Frame frame) {
  Trajectory3D t;
  t.frame = frame;
  t.waypoints.reserve(points.size());
  for (const auto& p : points) t.waypoints.push_back({p[0], p[1], p[2], frame});
  return t;
}

inline Trajectory2D to_trajectory2d(const std::vector<Eigen::VectorXd>& points) {
  Trajectory2D t;
  t.waypoints.reserve(points.size());
  for (const auto& p : points) t.waypoints.push_back({p[0], p[1]});
  return t;
}

std::vector<Eigen::VectorXd> smooth(const std::vector<Eigen::VectorXd>& points, int degree,
                                    std::span<const double> weights);
std::vector<Eigen::VectorXd> resample(const std::vector<Eigen::VectorXd>& points, int k);

}  // namespace stguide::detail
