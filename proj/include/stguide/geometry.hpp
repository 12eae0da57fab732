#pragma once

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "stguide/raster.hpp"

namespace stguide {

// Pinhole intrinsics. Camera frame: +z forward, +x right, +y down.
class CameraIntrinsics {
 public:
  CameraIntrinsics(double fx, double fy, double cx, double cy, int width, int height);

  double fx() const noexcept { return fx_; }
  double fy() const noexcept { return fy_; }
  double cx() const noexcept { return cx_; }
  double cy() const noexcept { return cy_; }
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  // Same focal lengths and principal point, scaled to a new image size.
  CameraIntrinsics resized(int width, int height) const;

  friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;

 private:
  double fx_, fy_, cx_, cy_;
  int width_, height_;
};

enum class Frame { kCamera, kWorkspace };

struct Pixel {
  double u = 0.0;
  double v = 0.0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  Frame frame = Frame::kCamera;

  Eigen::Vector3d vec() const { return {x, y, z}; }
  static Point3 from(const Eigen::Vector3d& v, Frame frame) { return {v.x(), v.y(), v.z(), frame}; }
  friend bool operator==(const Point3&, const Point3&) = default;
};

double distance(const Point3& a, const Point3& b);

// Rotation (unit quaternion, xyzw on the wire) followed by translation.
class RigidTransform {
 public:
  RigidTransform() = default;
  // Normalizes the quaternion; throws InvalidArgument on a zero or
  // non-finite quaternion.
  RigidTransform(const Eigen::Quaterniond& rotation, const Eigen::Vector3d& translation);

  static RigidTransform identity() { return {}; }
  static RigidTransform from_xyzw(const std::array<double, 4>& xyzw,
                                  const std::array<double, 3>& translation);

  const Eigen::Quaterniond& rotation() const noexcept { return rotation_; }
  const Eigen::Vector3d& translation() const noexcept { return translation_; }
  std::array<double, 4> xyzw() const;

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const;
  Point3 apply(const Point3& p, Frame target) const;
  RigidTransform inverse() const;
  // (a * b).apply(p) == a.apply(b.apply(p))
  friend RigidTransform operator*(const RigidTransform& a, const RigidTransform& b);

 private:
  Eigen::Quaterniond rotation_ = Eigen::Quaterniond::Identity();
  Eigen::Vector3d translation_ = Eigen::Vector3d::Zero();
};

enum class Gripper : int { kOpen = 0, kClosed = 1 };

struct Keypose {
  RigidTransform pose;
  Gripper gripper = Gripper::kOpen;
};

struct PointCloud {
  std::vector<Point3> points;
  // Empty, or one RGB triple per point.
  std::vector<std::array<std::uint8_t, 3>> colors;

  bool has_colors() const noexcept { return !colors.empty(); }
  std::size_t size() const noexcept { return points.size(); }
};

// Throws NonPositiveDepth unless z is finite and > 0.
Point3 unproject(const Pixel& p, double z, const CameraIntrinsics& k);

// `camera_from_point` maps p into the camera frame. Throws BehindCamera when
// the transformed point has z <= 0. No clamping to the image.
Pixel project(const Point3& p, const CameraIntrinsics& k,
              const RigidTransform& camera_from_point = RigidTransform::identity());

// One point per valid depth pixel in row-major order, pixel centers at integer
// coordinates.
PointCloud unproject_map(const DepthMap& depth, const RgbImage* rgb, const CameraIntrinsics& k);

// (u / width, v / height). Throws OutOfBounds outside [0,width]x[0,height].
std::array<double, 2> normalize_unit(const Pixel& p, int width, int height);
// round(1000 u / width), round(1000 v / height), half away from zero, clamped
// to [0, 1000].
std::array<int, 2> normalize_thousand(const Pixel& p, int width, int height);
inline std::array<double, 2> normalize_unit(const Pixel& p, const CameraIntrinsics& k) {
  return normalize_unit(p, k.width(), k.height());
}
inline std::array<int, 2> normalize_thousand(const Pixel& p, const CameraIntrinsics& k) {
  return normalize_thousand(p, k.width(), k.height());
}
Pixel denormalize_thousand(const std::array<int, 2>& q, int width, int height);

struct DepthLookupOptions {
  // Radius (pixels) for the nearest-valid fallback.
  double fallback_radius = 5.0;
};

// Sub-pixel depth: bilinear over the valid members of the 4 surrounding
// pixels (weights renormalized); with fewer than 2 valid members, the nearest
// valid pixel within the fallback radius. nullopt when nothing qualifies.
std::optional<double> sample_depth(const DepthMap& depth, const Pixel& p,
                                   const DepthLookupOptions& options = {});

}  // namespace stguide
