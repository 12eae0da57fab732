#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stguide/guidance.hpp"
#include "stguide/metrics.hpp"
#include "stguide/serialization.hpp"

namespace stguide::sim {

struct SimObject {
  std::string id;
  std::string kind;
  RigidTransform pose;       // workspace from object
  Eigen::Vector3d extent;    // half-sizes, meters
  std::array<std::uint8_t, 3> color{200, 200, 200};

  // Top-face centre: where the gripper grasps.
  Eigen::Vector3d grasp_point() const;
};

struct GoalRegion {
  std::string id;
  Eigen::Vector3d center;
  double radius = 0.03;
};

struct WorldState {
  std::map<std::string, SimObject> objects;
  std::map<std::string, GoalRegion> goals;
  Keypose effector;
  std::optional<std::string> held;
  Eigen::Vector3d held_offset = Eigen::Vector3d::Zero();  // object centre minus effector
  int step = 0;

  // Throws UnknownEntity.
  const SimObject& object(const std::string& id) const;
  const GoalRegion& goal(const std::string& id) const;
};

// Axis-aligned workspace with z up; no table surface is rendered.
struct Camera {
  CameraIntrinsics k;
  RigidTransform workspace_from_camera;
};

// Objects and goal pads (thin squares under each goal centre) ray-cast into
// flat-colour RGB, metric depth and one instance mask per id.
Observation render_observation(const WorldState& world, const Camera& camera);

inline constexpr double kGoalPadThickness = 0.002;
inline constexpr std::array<std::uint8_t, 3> kGoalPadColor{90, 90, 90};
inline constexpr double kGraspTolerance = 0.01;

bool in_goal(const WorldState& world, const std::string& object, const std::string& goal);

// ---- Interfaces -----------------------------------------------------------

struct PlannerRequest {
  const Observation& observation;
  const std::string& instruction;
  int step;
  const WorldState& world;  // privileged truth, used by the mock
  const Camera& camera;
};

class Planner {
 public:
  virtual ~Planner() = default;
  virtual GuidancePackage plan(const PlannerRequest& request) = 0;
};

struct PolicyRequest {
  const AugmentedObservation& observation;
  const WorldState& state;
  const std::string& sub_instruction;
  const GuidancePackage* guidance;
  int step;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual void reset() {}
  virtual void on_guidance(const GuidancePackage& /*guidance*/, const WorldState& /*state*/) {}
  virtual Keypose act(const PolicyRequest& request) = 0;
};

// Straight 8-waypoint line from the target's grasp point to the goal centre
// raised by the target's half height. The instruction must mention one
// object id and one goal id (first occurrences win).
class MockPlanner : public Planner {
 public:
  GuidancePackage plan(const PlannerRequest& request) override;
};

// Follows the guidance polyline at most `step_length` per step, carrying the
// leftover distance past intermediate waypoints. Closes the gripper on
// reaching waypoint 0 and opens it on reaching the last waypoint.
class MockPolicy : public Policy {
 public:
  explicit MockPolicy(double step_length = 0.05);

  void reset() override;
  void on_guidance(const GuidancePackage& guidance, const WorldState& state) override;
  Keypose act(const PolicyRequest& request) override;

  std::size_t next_index() const noexcept { return next_; }

 private:
  double step_length_;
  std::optional<GuidancePackage> guidance_;
  std::size_t next_ = 0;
};

// ---- Episodes -------------------------------------------------------------

struct Disturbance {
  int step = 0;
  std::string object;
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
};

struct StageGoal {
  std::string instruction;
  std::string object;
  std::string goal;
};

struct EpisodeConfig {
  int replan_interval = 5;  // H
  int max_steps = 25;
  double step_length = 0.05;
  // Uniform xy offset in [-j, j] applied to every object from the seed.
  double placement_jitter = 0.0;
  std::uint64_t seed = 0;
  std::vector<Disturbance> disturbances;
  std::vector<StageGoal> stages;
  // Sequential per-stage instructions with refresh on stage advance; when
  // false the planner always receives `task_instruction`.
  bool stage_loop = true;
  std::string task_instruction;  // defaults to the stage instructions joined
  AugmentMode mode = AugmentMode::kFinetuned;
  GuidanceParams guidance;

  void validate() const;
  std::string full_instruction() const;
};

struct Scenario {
  std::string name;
  WorldState world;
  Camera camera;
  EpisodeConfig config;
};

struct IssueMarker {
  std::string reason;  // "schedule" | "stage_advance"
  std::string sub_instruction;
  std::size_t waypoints = 0;
  bool degenerate = false;
};

struct StepRecord {
  int step = 0;
  int stage = 0;
  std::optional<IssueMarker> issue;
  Keypose action;
  std::vector<std::string> relevant_ids;
  Eigen::Vector3d effector = Eigen::Vector3d::Zero();  // after the action
  std::optional<std::string> held;
  std::map<std::string, Eigen::Vector3d> object_positions;
};

struct EpisodeResult {
  bool success = false;
  int steps_used = 0;
  std::vector<StepRecord> trace;
  std::vector<bool> stage_completed;
  std::vector<int> stage_completion_step;  // -1 when never completed
};

// Per-step observer (e.g. for dumping images); may be empty.
using StepObserver = std::function<void(int step, const Observation&, const AugmentedObservation&)>;

WorldState initial_world(const Scenario& scenario, std::uint64_t seed);

EpisodeResult run_episode(const Scenario& scenario, Planner& planner, Policy& policy, std::uint64_t seed,
                          const StepObserver& observer = {});

struct ScenarioOutcome {
  std::string scenario;
  std::vector<std::uint64_t> seeds;
  std::vector<EpisodeResult> episodes;  // one per seed
  SuccessStats stats;
};

using PlannerFactory = std::function<std::unique_ptr<Planner>()>;
using PolicyFactory = std::function<std::unique_ptr<Policy>(const Scenario&)>;

// One episode per (scenario, seed); throws InvalidArgument on empty inputs.
std::vector<ScenarioOutcome> run_suite(const std::vector<Scenario>& scenarios, const std::vector<std::uint64_t>& seeds,
                                       const PlannerFactory& planners, const PolicyFactory& policies);

// ---- Serialization --------------------------------------------------------

Scenario scenario_from_json(const json::Json& j);
Scenario read_scenario(const std::filesystem::path& path);
json::Json to_json(const WorldState& world);
json::Json to_json(const EpisodeResult& result);
json::Json to_json(const Keypose& keypose);
Keypose keypose_from_json(const json::Json& j);

// ---- Exec plug-ins --------------------------------------------------------

inline constexpr const char* kProtocolVersion = "stguide-plugin/1";

// Child process speaking line-delimited JSON on stdin/stdout. The host sends
// {"type":"hello","protocol":..., "role":...} and expects the same protocol
// string echoed back. Any violation throws Protocol.
class ExecChannel {
 public:
  ExecChannel(std::vector<std::string> argv, std::string role);
  ~ExecChannel();
  ExecChannel(const ExecChannel&) = delete;
  ExecChannel& operator=(const ExecChannel&) = delete;

  json::Json request(const json::Json& message);

 private:
  void send(const json::Json& message);
  json::Json receive();

  std::vector<std::string> argv_;
  std::string role_;
  int fd_ = -1;
  int pid_ = -1;
  std::string buffer_;
};

// Writes request observations under `workdir` and forwards them to the child.
class ExecPlanner : public Planner {
 public:
  ExecPlanner(std::vector<std::string> argv, std::filesystem::path workdir);
  GuidancePackage plan(const PlannerRequest& request) override;

 private:
  ExecChannel channel_;
  std::filesystem::path workdir_;
};

class ExecPolicy : public Policy {
 public:
  ExecPolicy(std::vector<std::string> argv, std::filesystem::path workdir);
  Keypose act(const PolicyRequest& request) override;

 private:
  ExecChannel channel_;
  std::filesystem::path workdir_;
};

}  // namespace stguide::sim
