#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stguide/geometry.hpp"
#include "stguide/serialization.hpp"
#include "stguide/trajectory.hpp"

namespace stguide {

enum class TaskKind { kPointing2D, kTrajectory2D, kSpatial3D, kDepth3D, kPlanning4D };

inline constexpr std::array<TaskKind, 5> kAllTaskKinds{TaskKind::kPointing2D, TaskKind::kTrajectory2D,
                                                       TaskKind::kSpatial3D, TaskKind::kDepth3D,
                                                       TaskKind::kPlanning4D};

// "pointing_2d", "trajectory_2d", "spatial_3d", "depth_3d", "planning_4d"
std::string_view task_kind_name(TaskKind kind);
std::optional<TaskKind> parse_task_kind(std::string_view name);

// ---- Raw annotations ------------------------------------------------------

struct CoordinateEntry {
  std::string key;  // e.g. "coordinate_0"
  std::string text;
  std::optional<std::array<int, 2>> image_coordinates;
  // Stored verbatim; only the first three (position, meters) are used.
  std::optional<std::array<double, 6>> cartesian_coordinates;
  json::Json extras = json::Json::object();
};

struct ArmDescription {
  std::string action_description;
  std::vector<CoordinateEntry> coordinates;
  json::Json extras = json::Json::object();
};

struct ActionRecord {
  int start_frame = 0;
  int end_frame = 0;
  std::optional<ArmDescription> left;
  std::optional<ArmDescription> right;
  json::Json extras = json::Json::object();

  // Left-arm text, else right-arm text.
  std::string description() const;
};

struct AnnotationRecord {
  std::string task_description;
  std::vector<ActionRecord> actions;
  std::string camera_intrinsics_raw;
  // fx, fy, cx, cy when the raw value is a parseable 3x3 matrix.
  std::optional<std::array<double, 4>> intrinsics_matrix;
  json::Json extras = json::Json::object();
};

// Throws SchemaViolation with the offending field path.
AnnotationRecord parse_annotation(const json::Json& document);
AnnotationRecord read_annotation(const std::filesystem::path& path);

// ---- Samples --------------------------------------------------------------

struct Message {
  std::string role;  // "user" | "assistant"
  std::string content;
  friend bool operator==(const Message&, const Message&) = default;
};

struct SampleMeta {
  TaskKind kind = TaskKind::kPointing2D;
  std::string task;
  std::string variation;
  std::string video;
  friend bool operator==(const SampleMeta&, const SampleMeta&) = default;
};

struct SampleRecord {
  std::vector<Message> messages;
  std::vector<std::string> images;
  std::optional<std::vector<std::array<int, 2>>> traj_2d;
  std::optional<SampleMeta> meta;
  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

// Throws SchemaViolation: roles must alternate starting with "user";
// traj_2d must hold exactly 8 pairs in [0, 1000].
void validate_sample(const SampleRecord& sample);

// Key order: messages, images, objects, meta.
json::Json to_json(const SampleRecord& sample);
SampleRecord sample_from_json(const json::Json& j);

enum class SampleFormat { kDocuments, kJsonLines };

// kDocuments: `path` is a directory receiving sample_NNNNNN.json files.
// kJsonLines: `path` is one file, one compact document per line.
// Returns the files written.
std::vector<std::filesystem::path> write_samples(const std::vector<SampleRecord>& samples,
                                                 const std::filesystem::path& path, SampleFormat format);
std::vector<SampleRecord> read_samples_jsonl(const std::filesystem::path& path);

// ---- Prompt templates -----------------------------------------------------

// Named prompt texts with {placeholder} substitution.
class PromptTemplates {
 public:
  explicit PromptTemplates(std::map<std::string, std::string> templates);

  static PromptTemplates load(const std::filesystem::path& path);
  // The bundled data/prompts/templates.json.
  static PromptTemplates bundled();

  // Throws SchemaViolation for an unknown key or unresolved placeholder.
  std::string render(std::string_view key, const std::map<std::string, std::string>& vars) const;
  bool has(std::string_view key) const { return templates_.count(std::string(key)) > 0; }

 private:
  std::map<std::string, std::string> templates_;
};

std::filesystem::path bundled_data_dir();

// ---- Generators -----------------------------------------------------------

struct GenerationOptions {
  std::string video;      // "data/<video>/..." image paths
  std::string variation;  // defaults to the task description when empty
  std::string image_extension = ".png";
  // Maximum reprojection disagreement between 3D and 2D labels (pixels).
  double consistency_px = 2.0;
  // Spatial relations with |delta| <= dead_zone (meters) are omitted.
  double dead_zone = 0.02;
  int depth_decimals = 3;
  std::string none_sentinel = "none";
  // Maps annotation cartesian coordinates into the camera frame.
  RigidTransform camera_from_annotation;
  ExtractOptions extract;
  LiftOptions lift;
};

struct SkippedSample {
  TaskKind kind;
  std::string reference;
  std::string reason;
};

struct GenerationReport {
  std::vector<SampleRecord> samples;
  std::vector<SkippedSample> skipped;

  void append(GenerationReport&& other);
};

// "data/<video>/rgb/frame_NNN<ext>"
std::string frame_image_path(const GenerationOptions& options, int frame);

GenerationReport gen_pointing(const AnnotationRecord& record, const CameraIntrinsics& k,
                              const PromptTemplates& templates, const GenerationOptions& options = {});

// One optional track per action (index-aligned with record.actions).
GenerationReport gen_trajectory(const AnnotationRecord& record, const std::vector<std::optional<Track2D>>& tracks,
                                int width, int height, const PromptTemplates& templates,
                                const GenerationOptions& options = {});

// One optional depth map per action, aligned with the action's start frame.
GenerationReport gen_depth(const AnnotationRecord& record, const std::vector<std::optional<Track2D>>& tracks,
                           const std::vector<std::optional<DepthMap>>& depths, const CameraIntrinsics& k,
                           const PromptTemplates& templates, const GenerationOptions& options = {});

enum class SpatialRelation { kLeftOf, kRightOf, kInFrontOf, kBehind, kAbove, kBelow, kNearer, kFarther };
std::string_view relation_name(SpatialRelation r);

struct RelationFact {
  std::string a;
  std::string b;
  SpatialRelation relation;
};

// Camera-frame relations of a relative to b; axes inside the dead zone are
// omitted. "Nearer"/"farther" compare distances to the camera origin.
std::vector<RelationFact> spatial_relations(const std::string& a, const Eigen::Vector3d& pa, const std::string& b,
                                            const Eigen::Vector3d& pb, double dead_zone);

GenerationReport gen_spatial(const AnnotationRecord& record, const PromptTemplates& templates,
                             const GenerationOptions& options = {});

// `traj_2d` per action (thousand scale) drives remaining-trajectory samples;
// actions without one only get instruction/progress samples.
GenerationReport gen_planning(const AnnotationRecord& record,
                              const std::vector<std::optional<std::vector<std::array<int, 2>>>>& traj_2d,
                              const PromptTemplates& templates, const GenerationOptions& options = {});

// ---- Splits ---------------------------------------------------------------

struct TaskSplit {
  std::string task;
  std::vector<std::string> seen;
  std::vector<std::string> unseen;
};

struct SplitSpec {
  std::string name;
  std::vector<TaskSplit> tasks;

  // Throws SchemaViolation when seen and unseen overlap.
  void validate() const;
  const TaskSplit* find(std::string_view task) const;
};

SplitSpec split_from_json(const json::Json& j);
SplitSpec read_split(const std::filesystem::path& path);

struct SplitCounts {
  std::size_t seen = 0;
  std::size_t unseen = 0;
};

struct SplitResult {
  std::vector<SampleRecord> seen;
  std::vector<SampleRecord> unseen;
  std::map<std::string, SplitCounts> per_task;
};

// Throws UnknownVariation for a sample whose task or variation the spec does
// not list.
SplitResult apply_split(const std::vector<SampleRecord>& samples, const SplitSpec& spec);

}  // namespace stguide
