#pragma once

#include <set>
#include <string>
#include <vector>

#include "stguide/guidance.hpp"

namespace stguide::detail {

struct SceneObjects {
  std::vector<ObjectOccupancy> occupancies;  // masks with valid depth only
  std::set<std::string> ids;                 // every mask id
};

SceneObjects scene_objects(const Observation& observation, const CameraIntrinsics& k,
                           const RigidTransform& workspace_from_camera);

std::set<std::string> tube_relevant(const SceneObjects& scene, const SpatialTube& tube);

// Falloff from the relevant masks, applied only inside irrelevant masks.
WeightMapResult relevance_weights(const Observation& observation, const std::set<std::string>& relevant,
                                  double sigma);

}  // namespace stguide::detail
