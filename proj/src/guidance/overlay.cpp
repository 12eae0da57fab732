#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "stguide/guidance.hpp"

namespace stguide {

namespace {

struct Vertex {
  Pixel pixel;
  std::array<double, 3> color;
};

void stamp(OverlayLayer& layer, double u, double v, const std::array<double, 3>& color, int line_width) {
  const long cu = std::lround(u);
  const long cv = std::lround(v);
  const int lo = -(line_width - 1) / 2;
  const int hi = line_width / 2;
  for (int dy = lo; dy <= hi; ++dy) {
    for (int dx = lo; dx <= hi; ++dx) {
      const long px = cu + dx;
      const long py = cv + dy;
      if (px < 0 || py < 0 || px >= layer.coverage.width() || py >= layer.coverage.height()) continue;
      const int x = static_cast<int>(px);
      const int y = static_cast<int>(py);
      layer.coverage.at(x, y) = 1;
      for (int c = 0; c < 3; ++c) layer.color.at(x, y, c) = color[c];
    }
  }
}

void draw_segment(OverlayLayer& layer, const Vertex& a, const Vertex& b, int line_width) {
  const double du = b.pixel.u - a.pixel.u;
  const double dv = b.pixel.v - a.pixel.v;
  const double steps = std::ceil(std::max(std::abs(du), std::abs(dv)));
  const double limit = 4.0 * (layer.coverage.width() + layer.coverage.height()) + 16.0;
  const long n = static_cast<long>(std::min(steps, limit));
  if (n == 0) {
    stamp(layer, a.pixel.u, a.pixel.v, a.color, line_width);
    return;
  }
  for (long s = 0; s <= n; ++s) {
    const double t = static_cast<double>(s) / static_cast<double>(n);
    std::array<double, 3> color{};
    for (int c = 0; c < 3; ++c) color[c] = a.color[c] + t * (b.color[c] - a.color[c]);
    stamp(layer, a.pixel.u + t * du, a.pixel.v + t * dv, color, line_width);
  }
}

}  // namespace

OverlayLayer draw_trajectory_layer(int width, int height, const Trajectory3D& trajectory,
                                   const CameraIntrinsics& k, const RigidTransform& camera_from_trajectory,
                                   int line_width) {
  if (line_width < 1) throw Error(ErrorCode::kInvalidArgument, "line width must be >= 1");
  OverlayLayer layer{BinaryMask(width, height), Raster<double>(width, height, 3)};

  std::vector<std::optional<Eigen::Vector3d>> cam;
  cam.reserve(trajectory.waypoints.size());
  double zmin = std::numeric_limits<double>::infinity();
  double zmax = -zmin;
  for (const Point3& p : trajectory.waypoints) {
    const Eigen::Vector3d c = camera_from_trajectory.apply(p.vec());
    if (c.z() > 0.0 && c.allFinite()) {
      cam.emplace_back(c);
      zmin = std::min(zmin, c.z());
      zmax = std::max(zmax, c.z());
    } else {
      cam.emplace_back(std::nullopt);
    }
  }
  if (zmin > zmax) throw Error(ErrorCode::kAllBehindCamera, "no trajectory waypoint is in front of the camera");

  std::vector<std::optional<Vertex>> vertices;
  for (const auto& c : cam) {
    if (!c) {
      vertices.emplace_back(std::nullopt);
      continue;
    }
    const double t = zmax > zmin ? (c->z() - zmin) / (zmax - zmin) : 0.0;
    const Pixel px = project(Point3::from(*c, Frame::kCamera), k);
    vertices.push_back(Vertex{px, {255.0 * (1.0 - t), 0.0, 255.0 * t}});
  }

  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (!vertices[i]) continue;
    const bool prev = i > 0 && vertices[i - 1];
    const bool next = i + 1 < vertices.size() && vertices[i + 1];
    if (next) {
      draw_segment(layer, *vertices[i], *vertices[i + 1], line_width);
    } else if (!prev) {
      stamp(layer, vertices[i]->pixel.u, vertices[i]->pixel.v, vertices[i]->color, line_width);
    }
  }
  return layer;
}

RgbImage composite_overlay(const RgbImage& rgb, const OverlayLayer& layer, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "alpha must be in (0, 1]");
  if (!rgb.same_size(layer.coverage)) throw Error(ErrorCode::kDimensionMismatch, "overlay size differs");
  RgbImage out = rgb;
  for (int y = 0; y < rgb.height(); ++y) {
    for (int x = 0; x < rgb.width(); ++x) {
      if (!layer.coverage.at(x, y)) continue;
      for (int c = 0; c < 3; ++c) {
        const double v = alpha * layer.color.at(x, y, c) + (1.0 - alpha) * rgb.at(x, y, c);
        out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
      }
    }
  }
  return out;
}

RgbImage render_overlay(const RgbImage& rgb, const Trajectory3D& trajectory, const CameraIntrinsics& k,
                        const RigidTransform& camera_from_trajectory, double alpha, int line_width) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "alpha must be in (0, 1]");
  const OverlayLayer layer =
      draw_trajectory_layer(rgb.width(), rgb.height(), trajectory, k, camera_from_trajectory, line_width);
  return composite_overlay(rgb, layer, alpha);
}

}  // namespace stguide
