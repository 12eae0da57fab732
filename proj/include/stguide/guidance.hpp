#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stguide/geometry.hpp"
#include "stguide/trajectory.hpp"

namespace stguide {

enum class TubeShape {
  // Union of capsules around consecutive waypoint segments.
  kCapsuleChain,
  // Union of balls centred on the waypoints only.
  kBallUnion,
};

double point_segment_distance(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                              const Eigen::Vector3d& b);

// Operational volume of radius r around a waypoint sequence (workspace frame).
class SpatialTube {
 public:
  SpatialTube(std::vector<Point3> waypoints, double radius, TubeShape shape = TubeShape::kCapsuleChain);

  double radius() const noexcept { return radius_; }
  TubeShape shape() const noexcept { return shape_; }
  const std::vector<Point3>& waypoints() const noexcept { return waypoints_; }

  // Distance from p to the tube axis set (segments or waypoints).
  double axis_distance(const Eigen::Vector3d& p) const;
  bool contains(const Eigen::Vector3d& p) const { return axis_distance(p) <= radius_; }
  bool contains(const Point3& p) const { return contains(p.vec()); }

 private:
  std::vector<Point3> waypoints_;
  double radius_;
  TubeShape shape_;
};

SpatialTube build_tube(const Trajectory3D& trajectory, double radius,
                       TubeShape shape = TubeShape::kCapsuleChain);

// Instance segmentation produced outside this library.
struct InstanceMask {
  std::string id;
  BinaryMask mask;
  std::string source = "external";
};

struct ObjectOccupancy {
  std::string id;
  PointCloud points;  // workspace frame
};

// Unprojects every valid-depth mask pixel and maps it to the workspace.
// Throws EmptyOccupancy when no mask pixel has valid depth.
ObjectOccupancy occupancy(const InstanceMask& mask, const DepthMap& depth, const CameraIntrinsics& k,
                          const RigidTransform& workspace_from_camera);

// True iff some occupancy point lies inside the tube.
bool relevance(const ObjectOccupancy& object, const SpatialTube& tube);

inline constexpr double kEndpointRadius = 0.10;

// Occupancy with the smallest point-to-terminal distance among those within
// `radius`; ties go to the lexicographically smallest id.
std::optional<std::string> endpoint_fallback(std::span<const ObjectOccupancy> objects,
                                             const Point3& terminal, double radius = kEndpointRadius);

// Exact squared Euclidean distance (pixels^2) from each pixel to the nearest
// set pixel of `seeds`; +inf everywhere when no pixel is set.
Raster<double> squared_distance_transform(const BinaryMask& seeds);

struct WeightMapResult {
  WeightMap weights;
  // No relevant pixel existed; the map is all ones.
  bool no_relevant_mask = false;
};

// 1 on relevant pixels, exp(-d^2 / (2 sigma^2)) elsewhere, d being the
// distance to the nearest relevant pixel.
WeightMapResult smooth_weight_map(const BinaryMask& relevant, double sigma);
WeightMapResult smooth_weight_map(std::span<const InstanceMask> relevant, int width, int height,
                                  double sigma);

// sigma = 8 px at 256x256, scaled with the image diagonal.
double default_sigma(int width, int height);

struct InpaintParams {
  float threshold = 0.5f;
  int max_iterations = 400;
  double tolerance = 1e-4;
  // Edge-stopping conductance 1 / (1 + (|dI| / kappa)^2) on the current
  // estimate; plain harmonic averaging when disabled.
  bool edge_stopping_rgb = true;
  bool edge_stopping_depth = false;
  double rgb_kappa = 30.0;   // intensity units
  double depth_kappa = 0.05;  // meters
};

struct InpaintResult {
  RgbImage rgb;
  DepthMap depth;
  std::size_t hole_pixels = 0;
  int rgb_iterations = 0;
  int depth_iterations = 0;
};

// Pixels with weight < threshold are filled by harmonic diffusion from the
// kept pixels (per RGB channel, and on valid depth), then blended as
// w * original + (1 - w) * diffused. Kept pixels are copied unchanged.
// Throws HoleCoversImage when nothing is kept.
InpaintResult inpaint(const RgbImage& rgb, const DepthMap& depth, const WeightMap& weights,
                      const InpaintParams& params = {});

// Rasterized trajectory polyline before compositing.
struct OverlayLayer {
  BinaryMask coverage;
  Raster<double> color;  // 3 channels, 0..255
};

// Projects waypoints and draws the polyline with per-vertex colors running
// red (nearest) to blue (farthest). Waypoints behind the camera split the
// polyline. Throws AllBehindCamera.
OverlayLayer draw_trajectory_layer(int width, int height, const Trajectory3D& trajectory,
                                   const CameraIntrinsics& k, const RigidTransform& camera_from_trajectory,
                                   int line_width = 1);

RgbImage composite_overlay(const RgbImage& rgb, const OverlayLayer& layer, double alpha);

RgbImage render_overlay(const RgbImage& rgb, const Trajectory3D& trajectory, const CameraIntrinsics& k,
                        const RigidTransform& camera_from_trajectory, double alpha, int line_width = 1);

// Unified guidance from the high-level planner.
struct GuidancePackage {
  Trajectory3D trajectory;  // workspace frame
  std::vector<std::string> relevant_ids;
  std::string sub_instruction;
  int issue_step = 0;
  // The planner could not produce a meaningful path (e.g. target already at goal).
  bool degenerate = false;
};

enum class AugmentMode { kFinetuned, kFrozen };

struct GuidanceParams {
  double tube_radius = 0.06;
  TubeShape tube_shape = TubeShape::kCapsuleChain;
  std::optional<double> sigma;  // default_sigma() when unset
  double alpha = 0.5;
  double endpoint_radius = kEndpointRadius;
  bool endpoint_fallback = true;
  int line_width = 1;
  InpaintParams inpaint;
};

struct Observation {
  RgbImage rgb;
  DepthMap depth;
  std::vector<InstanceMask> masks;
};

struct AugmentedObservation {
  RgbImage rgb;
  DepthMap depth;
  WeightMap weights;
  std::vector<std::string> relevant_ids;
  std::optional<std::string> fallback_id;
  bool no_relevant_mask = false;
};

// Relevance-weighted inpainting of the observation (plus the trajectory
// overlay in finetuned mode). Background pixels outside every instance mask
// keep weight 1; irrelevant instances get the smooth falloff.
AugmentedObservation augment(const Observation& observation, const GuidancePackage& guidance,
                             AugmentMode mode, const CameraIntrinsics& k,
                             const RigidTransform& workspace_from_camera, const GuidanceParams& params = {});

// Long-horizon focus loop: per stage, masks not touching the stage's
// reference tube are inpainted until the completion predicate fires.
struct StageSpec {
  std::string instruction;
  Trajectory3D reference;
};

struct StageScene {
  Observation observation;
  CameraIntrinsics k;
  RigidTransform workspace_from_camera;
};

struct StageEmission {
  int stage = 0;
  int step = 0;
  AugmentedObservation observation;
  std::vector<std::string> focus_ids;
  std::vector<std::string> masked_ids;
};

using SceneProvider = std::function<StageScene(int stage, int step)>;
using CompletionPredicate = std::function<bool(int stage, int step, const StageEmission&)>;
using EmissionSink = std::function<void(const StageEmission&)>;

struct StageLoopOptions {
  int step_budget = 25;  // per stage
  GuidanceParams params;
};

struct StageLoopSummary {
  std::vector<int> steps_per_stage;
  int total_steps = 0;
};

// Throws StageStalled when a stage exceeds the step budget.
StageLoopSummary stage_masking_loop(std::span<const StageSpec> stages, const SceneProvider& scenes,
                                    const CompletionPredicate& completed, const EmissionSink& sink,
                                    const StageLoopOptions& options = {});

}  // namespace stguide
