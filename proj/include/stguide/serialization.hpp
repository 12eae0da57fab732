#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "stguide/geometry.hpp"
#include "stguide/guidance.hpp"
#include "stguide/trajectory.hpp"

namespace stguide::json {

using Json = nlohmann::ordered_json;

// All readers throw SchemaViolation (with a field path) on malformed input.

Json to_json(const CameraIntrinsics& k);
CameraIntrinsics intrinsics_from_json(const Json& j);

// {"rotation": [x, y, z, w], "translation": [x, y, z]}
Json to_json(const RigidTransform& t);
RigidTransform transform_from_json(const Json& j);

// [[frame, u, v], ...]
Json to_json(const Track2D& track);
Track2D track_from_json(const Json& j);

// [[x, y, z], ...]
Json to_json(const Trajectory3D& t);
Trajectory3D trajectory3d_from_json(const Json& j, Frame frame);

// [[u, v], ...] integer pairs at thousand scale.
Json thousand_pairs(const Trajectory2D& t, int width, int height);

// {trajectory, relevant_ids, sub_instruction, issue_step[, degenerate]}
Json to_json(const GuidancePackage& g);
GuidancePackage guidance_from_json(const Json& j);

Json read_file(const std::filesystem::path& path);
// Pretty-printed (2-space indent) with a trailing newline.
void write_file(const std::filesystem::path& path, const Json& j);
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

// Fixed-point decimal rendering, e.g. format_fixed(0.5, 3) == "0.500".
std::string format_fixed(double value, int decimals);

// Required-field accessors with path-bearing SchemaViolation errors.
const Json& field(const Json& j, const std::string& key, const std::string& path);
double number(const Json& j, const std::string& path);
int integer(const Json& j, const std::string& path);
std::string string(const Json& j, const std::string& path);

}  // namespace stguide::json
