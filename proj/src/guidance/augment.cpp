#include <algorithm>

#include "masking.hpp"

namespace stguide {

namespace detail {

SceneObjects scene_objects(const Observation& observation, const CameraIntrinsics& k,
                           const RigidTransform& workspace_from_camera) {
  SceneObjects scene;
  for (const InstanceMask& m : observation.masks) {
    if (!scene.ids.insert(m.id).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate instance id '" + m.id + "'");
    }
    try {
      scene.occupancies.push_back(occupancy(m, observation.depth, k, workspace_from_camera));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptyOccupancy) throw;
    }
  }
  return scene;
}

std::set<std::string> tube_relevant(const SceneObjects& scene, const SpatialTube& tube) {
  std::set<std::string> out;
  for (const ObjectOccupancy& o : scene.occupancies) {
    if (relevance(o, tube)) out.insert(o.id);
  }
  return out;
}

WeightMapResult relevance_weights(const Observation& observation, const std::set<std::string>& relevant,
                                  double sigma) {
  const int w = observation.rgb.width();
  const int h = observation.rgb.height();
  BinaryMask keep(w, h);
  BinaryMask other(w, h);
  for (const InstanceMask& m : observation.masks) {
    if (!m.mask.same_size(w, h)) {
      throw Error(ErrorCode::kDimensionMismatch, "mask '" + m.id + "' has the wrong size");
    }
    BinaryMask& target = relevant.count(m.id) ? keep : other;
    auto src = m.mask.data();
    auto dst = target.data();
    for (std::size_t i = 0; i < dst.size(); ++i) {
      if (src[i]) dst[i] = 1;
    }
  }
  WeightMapResult result = smooth_weight_map(keep, sigma);
  auto weights = result.weights.data();
  auto in_other = other.data();
  auto in_keep = keep.data();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!in_other[i] || in_keep[i]) weights[i] = 1.0f;
  }
  return result;
}

}  // namespace detail

AugmentedObservation augment(const Observation& observation, const GuidancePackage& guidance,
                             AugmentMode mode, const CameraIntrinsics& k,
                             const RigidTransform& workspace_from_camera, const GuidanceParams& params) {
  if (observation.rgb.channels() != 3 || !observation.rgb.same_size(k.width(), k.height()) ||
      !observation.depth.same_size(observation.rgb)) {
    throw Error(ErrorCode::kDimensionMismatch, "observation does not match the intrinsics");
  }
  const SpatialTube tube = build_tube(guidance.trajectory, params.tube_radius, params.tube_shape);
  const detail::SceneObjects scene = detail::scene_objects(observation, k, workspace_from_camera);

  std::set<std::string> relevant = detail::tube_relevant(scene, tube);
  for (const std::string& id : guidance.relevant_ids) {
    if (!scene.ids.count(id)) {
      throw Error(ErrorCode::kUnknownEntity, "guidance names unknown instance '" + id + "'");
    }
    relevant.insert(id);
  }

  AugmentedObservation out;
  if (params.endpoint_fallback) {
    const Point3& terminal = guidance.trajectory.waypoints.back();
    std::vector<ObjectOccupancy> near;
    for (const ObjectOccupancy& o : scene.occupancies) {
      if (relevant.count(o.id)) near.push_back(o);
    }
    if (!endpoint_fallback(near, terminal, params.endpoint_radius)) {
      out.fallback_id = endpoint_fallback(scene.occupancies, terminal, params.endpoint_radius);
      if (out.fallback_id) relevant.insert(*out.fallback_id);
    }
  }

  const double sigma = params.sigma.value_or(default_sigma(k.width(), k.height()));
  WeightMapResult weights = detail::relevance_weights(observation, relevant, sigma);
  InpaintResult filled = inpaint(observation.rgb, observation.depth, weights.weights, params.inpaint);

  out.depth = std::move(filled.depth);
  if (mode == AugmentMode::kFinetuned) {
    out.rgb = render_overlay(filled.rgb, guidance.trajectory, k, workspace_from_camera.inverse(), params.alpha,
                             params.line_width);
  } else {
    out.rgb = std::move(filled.rgb);
  }
  out.weights = std::move(weights.weights);
  out.no_relevant_mask = weights.no_relevant_mask;
  out.relevant_ids.assign(relevant.begin(), relevant.end());
  return out;
}

}  // namespace stguide
