#include <algorithm>
#include <limits>

#include "stguide/guidance.hpp"

namespace stguide {

double point_segment_distance(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                              const Eigen::Vector3d& b) {
  const Eigen::Vector3d ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

SpatialTube::SpatialTube(std::vector<Point3> waypoints, double radius, TubeShape shape)
    : waypoints_(std::move(waypoints)), radius_(radius), shape_(shape) {
  if (!(radius > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tube radius must be positive");
  if (waypoints_.size() < 2) throw Error(ErrorCode::kTooFewPoints, "tube needs at least 2 waypoints");
}

double SpatialTube::axis_distance(const Eigen::Vector3d& p) const {
  double best = std::numeric_limits<double>::infinity();
  if (shape_ == TubeShape::kBallUnion) {
    for (const Point3& w : waypoints_) best = std::min(best, (p - w.vec()).norm());
    return best;
  }
  for (std::size_t i = 0; i + 1 < waypoints_.size(); ++i) {
    best = std::min(best, point_segment_distance(p, waypoints_[i].vec(), waypoints_[i + 1].vec()));
  }
  return best;
}

SpatialTube build_tube(const Trajectory3D& trajectory, double radius, TubeShape shape) {
  return SpatialTube(trajectory.waypoints, radius, shape);
}

ObjectOccupancy occupancy(const InstanceMask& mask, const DepthMap& depth, const CameraIntrinsics& k,
                          const RigidTransform& workspace_from_camera) {
  if (!depth.same_size(k.width(), k.height()) || !mask.mask.same_size(depth)) {
    throw Error(ErrorCode::kDimensionMismatch, "mask '" + mask.id + "' does not match the depth map");
  }
  ObjectOccupancy out{mask.id, {}};
  for (int y = 0; y < depth.height(); ++y) {
    for (int x = 0; x < depth.width(); ++x) {
      if (!mask.mask.at(x, y)) continue;
      const double z = depth.at(x, y);
      if (!valid_depth(z)) continue;
      const Point3 cam = unproject({static_cast<double>(x), static_cast<double>(y)}, z, k);
      out.points.points.push_back(workspace_from_camera.apply(cam, Frame::kWorkspace));
    }
  }
  if (out.points.points.empty()) {
    throw Error(ErrorCode::kEmptyOccupancy, "mask '" + mask.id + "' has no valid depth");
  }
  return out;
}

bool relevance(const ObjectOccupancy& object, const SpatialTube& tube) {
  if (object.points.points.empty()) {
    throw Error(ErrorCode::kEmptyOccupancy, "relevance query on empty occupancy '" + object.id + "'");
  }
  return std::any_of(object.points.points.begin(), object.points.points.end(),
                     [&](const Point3& p) { return tube.contains(p); });
}

std::optional<std::string> endpoint_fallback(std::span<const ObjectOccupancy> objects,
                                             const Point3& terminal, double radius) {
  std::optional<std::string> best_id;
  double best = std::numeric_limits<double>::infinity();
  const Eigen::Vector3d t = terminal.vec();
  for (const ObjectOccupancy& o : objects) {
    double d = std::numeric_limits<double>::infinity();
    for (const Point3& p : o.points.points) d = std::min(d, (p.vec() - t).norm());
    if (d > radius) continue;
    if (d < best || (d == best && best_id && o.id < *best_id)) {
      best = d;
      best_id = o.id;
    }
  }
  return best_id;
}

}  // namespace stguide
