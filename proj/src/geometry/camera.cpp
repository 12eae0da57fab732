#include <algorithm>
#include <cmath>
#include <string>

#include "stguide/geometry.hpp"

namespace stguide {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNonPositiveDepth: return "NonPositiveDepth";
    case ErrorCode::kBehindCamera: return "BehindCamera";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kOutOfBounds: return "OutOfBounds";
    case ErrorCode::kTooFewPoints: return "TooFewPoints";
    case ErrorCode::kAllDepthInvalid: return "AllDepthInvalid";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kZeroLength: return "ZeroLength";
    case ErrorCode::kInvalidAnchor: return "InvalidAnchor";
    case ErrorCode::kEmptyOccupancy: return "EmptyOccupancy";
    case ErrorCode::kHoleCoversImage: return "HoleCoversImage";
    case ErrorCode::kAllBehindCamera: return "AllBehindCamera";
    case ErrorCode::kStageStalled: return "StageStalled";
    case ErrorCode::kSchemaViolation: return "SchemaViolation";
    case ErrorCode::kUnknownVariation: return "UnknownVariation";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kEmptySet: return "EmptySet";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kNonPositiveGroundTruth: return "NonPositiveGroundTruth";
    case ErrorCode::kEmptyGroup: return "EmptyGroup";
    case ErrorCode::kNoScorer: return "NoScorer";
    case ErrorCode::kUnknownEntity: return "UnknownEntity";
    case ErrorCode::kNoGuidance: return "NoGuidance";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kProtocol: return "ProtocolError";
  }
  return "Unknown";
}

CameraIntrinsics::CameraIntrinsics(double fx, double fy, double cx, double cy, int width,
                                   int height)
    : fx_(fx), fy_(fy), cx_(cx), cy_(cy), width_(width), height_(height) {
  if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(fx) || !std::isfinite(fy)) {
    throw Error(ErrorCode::kInvalidArgument, "focal lengths must be positive and finite");
  }
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "image size must be positive");
  }
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
    throw Error(ErrorCode::kInvalidArgument, "principal point must lie inside the image");
  }
}

CameraIntrinsics CameraIntrinsics::resized(int width, int height) const {
  const double sx = static_cast<double>(width) / width_;
  const double sy = static_cast<double>(height) / height_;
  return {fx_ * sx, fy_ * sy, cx_ * sx, cy_ * sy, width, height};
}

double distance(const Point3& a, const Point3& b) { return (a.vec() - b.vec()).norm(); }

RigidTransform::RigidTransform(const Eigen::Quaterniond& rotation,
                               const Eigen::Vector3d& translation)
    : rotation_(rotation), translation_(translation) {
  const double n = rotation_.norm();
  if (!std::isfinite(n) || n < 1e-12) {
    throw Error(ErrorCode::kInvalidArgument, "rotation quaternion must be nonzero and finite");
  }
  if (!translation_.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "translation must be finite");
  }
  rotation_.coeffs() /= n;
}

RigidTransform RigidTransform::from_xyzw(const std::array<double, 4>& xyzw,
                                         const std::array<double, 3>& translation) {
  // Eigen's constructor takes (w, x, y, z).
  return {Eigen::Quaterniond(xyzw[3], xyzw[0], xyzw[1], xyzw[2]),
          Eigen::Vector3d(translation[0], translation[1], translation[2])};
}

std::array<double, 4> RigidTransform::xyzw() const {
  return {rotation_.x(), rotation_.y(), rotation_.z(), rotation_.w()};
}

Eigen::Vector3d RigidTransform::apply(const Eigen::Vector3d& p) const {
  return rotation_ * p + translation_;
}

Point3 RigidTransform::apply(const Point3& p, Frame target) const {
  return Point3::from(apply(p.vec()), target);
}

RigidTransform RigidTransform::inverse() const {
  const Eigen::Quaterniond inv = rotation_.conjugate();
  return {inv, -(inv * translation_)};
}

RigidTransform operator*(const RigidTransform& a, const RigidTransform& b) {
  return {a.rotation_ * b.rotation_, a.rotation_ * b.translation_ + a.translation_};
}

Point3 unproject(const Pixel& p, double z, const CameraIntrinsics& k) {
  if (!valid_depth(z)) {
    throw Error(ErrorCode::kNonPositiveDepth, "depth must be finite and > 0, got " + std::to_string(z));
  }
  return {(p.u - k.cx()) * z / k.fx(), (p.v - k.cy()) * z / k.fy(), z, Frame::kCamera};
}

Pixel project(const Point3& p, const CameraIntrinsics& k, const RigidTransform& camera_from_point) {
  const Eigen::Vector3d c = camera_from_point.apply(p.vec());
  if (!(c.z() > 0.0)) {
    throw Error(ErrorCode::kBehindCamera, "point lies behind the camera (z = " + std::to_string(c.z()) + ")");
  }
  return {k.fx() * c.x() / c.z() + k.cx(), k.fy() * c.y() / c.z() + k.cy()};
}

PointCloud unproject_map(const DepthMap& depth, const RgbImage* rgb, const CameraIntrinsics& k) {
  if (!depth.same_size(k.width(), k.height())) {
    throw Error(ErrorCode::kDimensionMismatch, "depth map size differs from intrinsics");
  }
  if (rgb != nullptr && (!rgb->same_size(depth) || rgb->channels() != 3)) {
    throw Error(ErrorCode::kDimensionMismatch, "rgb image size differs from depth map");
  }
  PointCloud cloud;
  for (int y = 0; y < depth.height(); ++y) {
    for (int x = 0; x < depth.width(); ++x) {
      const double z = depth.at(x, y);
      if (!valid_depth(z)) continue;
      cloud.points.push_back(unproject({static_cast<double>(x), static_cast<double>(y)}, z, k));
      if (rgb != nullptr) {
        cloud.colors.push_back({rgb->at(x, y, 0), rgb->at(x, y, 1), rgb->at(x, y, 2)});
      }
    }
  }
  return cloud;
}

namespace {

void check_in_bounds(const Pixel& p, int width, int height) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "image size must be positive");
  }
  if (!(p.u >= 0.0 && p.u <= width && p.v >= 0.0 && p.v <= height)) {
    throw Error(ErrorCode::kOutOfBounds, "pixel (" + std::to_string(p.u) + ", " +
                                             std::to_string(p.v) + ") outside the image");
  }
}

}  // namespace

std::array<double, 2> normalize_unit(const Pixel& p, int width, int height) {
  check_in_bounds(p, width, height);
  return {p.u / width, p.v / height};
}

std::array<int, 2> normalize_thousand(const Pixel& p, int width, int height) {
  check_in_bounds(p, width, height);
  // std::round rounds half away from zero.
  const auto scale = [](double value, int extent) {
    return std::clamp(static_cast<int>(std::round(1000.0 * value / extent)), 0, 1000);
  };
  return {scale(p.u, width), scale(p.v, height)};
}

Pixel denormalize_thousand(const std::array<int, 2>& q, int width, int height) {
  return {q[0] * static_cast<double>(width) / 1000.0, q[1] * static_cast<double>(height) / 1000.0};
}

}  // namespace stguide
