#include <algorithm>
#include <limits>

#include "stguide/sim.hpp"

namespace stguide::sim {

namespace {

inline constexpr std::array<std::uint8_t, 3> kBackground{40, 40, 40};

struct Solid {
  std::string id;
  RigidTransform object_from_workspace;
  Eigen::Vector3d extent;
  std::array<std::uint8_t, 3> color;
};

// Entry parameter of the ray o + t d into the box |x| <= e, or +inf on a miss.
double slab_entry(const Eigen::Vector3d& o, const Eigen::Vector3d& d, const Eigen::Vector3d& e) {
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (d[a] == 0.0) {
      if (o[a] < -e[a] || o[a] > e[a]) return std::numeric_limits<double>::infinity();
      continue;
    }
    double lo = (-e[a] - o[a]) / d[a];
    double hi = (e[a] - o[a]) / d[a];
    if (lo > hi) std::swap(lo, hi);
    t0 = std::max(t0, lo);
    t1 = std::min(t1, hi);
  }
  if (t0 > t1 || t0 <= 0.0) return std::numeric_limits<double>::infinity();
  return t0;
}

}  // namespace

Observation render_observation(const WorldState& world, const Camera& camera) {
  const CameraIntrinsics& k = camera.k;
  const int w = k.width();
  const int h = k.height();

  std::vector<Solid> solids;
  for (const auto& [id, o] : world.objects) solids.push_back({id, o.pose.inverse(), o.extent, o.color});
  for (const auto& [id, g] : world.goals) {
    const RigidTransform pad(Eigen::Quaterniond::Identity(),
                             Eigen::Vector3d(g.center.x(), g.center.y(), kGoalPadThickness / 2.0));
    solids.push_back({id, pad.inverse(), Eigen::Vector3d(g.radius, g.radius, kGoalPadThickness / 2.0), kGoalPadColor});
  }
  std::sort(solids.begin(), solids.end(), [](const Solid& a, const Solid& b) { return a.id < b.id; });

  Observation obs{make_rgb(w, h), DepthMap(w, h, 1, 0.0f), {}};
  for (const Solid& s : solids) obs.masks.push_back({s.id, BinaryMask(w, h), "render"});

  const Eigen::Vector3d origin = camera.workspace_from_camera.translation();
  const Eigen::Matrix3d r = camera.workspace_from_camera.rotation().toRotationMatrix();
  std::vector<Eigen::Vector3d> local_origin;
  std::vector<Eigen::Matrix3d> local_rotation;
  for (const Solid& s : solids) {
    local_origin.push_back(s.object_from_workspace.apply(origin));
    local_rotation.push_back(s.object_from_workspace.rotation().toRotationMatrix());
  }

  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const Eigen::Vector3d ray = r * Eigen::Vector3d((u - k.cx()) / k.fx(), (v - k.cy()) / k.fy(), 1.0);
      double best = std::numeric_limits<double>::infinity();
      std::size_t hit = solids.size();
      for (std::size_t i = 0; i < solids.size(); ++i) {
        const double t = slab_entry(local_origin[i], local_rotation[i] * ray, solids[i].extent);
        if (t < best) {
          best = t;
          hit = i;
        }
      }
      const auto& color = hit < solids.size() ? solids[hit].color : kBackground;
      for (int c = 0; c < 3; ++c) obs.rgb.at(u, v, c) = color[c];
      if (hit < solids.size()) {
        obs.depth.at(u, v) = static_cast<float>(best);
        obs.masks[hit].mask.at(u, v) = 1;
      }
    }
  }
  return obs;
}

}  // namespace stguide::sim
