#include "stguide/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace stguide::json {

namespace {

[[noreturn]] void violation(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kSchemaViolation, path + ": " + what);
}

const Json& array_of(const Json& j, std::size_t size, const std::string& path) {
  if (!j.is_array() || j.size() != size) {
    violation(path, "expected an array of " + std::to_string(size) + " elements");
  }
  return j;
}

}  // namespace

const Json& field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) violation(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) violation(path.empty() ? key : path + "." + key, "missing field");
  return *it;
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) violation(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) violation(path, "expected a finite number");
  return v;
}

int integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) violation(path, "expected an integer");
  return j.get<int>();
}

std::string string(const Json& j, const std::string& path) {
  if (!j.is_string()) violation(path, "expected a string");
  return j.get<std::string>();
}

Json to_json(const CameraIntrinsics& k) {
  return Json{{"fx", k.fx()},       {"fy", k.fy()},         {"cx", k.cx()},
              {"cy", k.cy()},       {"width", k.width()},   {"height", k.height()}};
}

CameraIntrinsics intrinsics_from_json(const Json& j) {
  try {
    return CameraIntrinsics(number(field(j, "fx", ""), "fx"), number(field(j, "fy", ""), "fy"),
                            number(field(j, "cx", ""), "cx"), number(field(j, "cy", ""), "cy"),
                            integer(field(j, "width", ""), "width"), integer(field(j, "height", ""), "height"));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kSchemaViolation) throw;
    throw Error(ErrorCode::kSchemaViolation, std::string("intrinsics: ") + e.what());
  }
}

Json to_json(const RigidTransform& t) {
  const auto q = t.xyzw();
  const Eigen::Vector3d& p = t.translation();
  return Json{{"rotation", {q[0], q[1], q[2], q[3]}}, {"translation", {p.x(), p.y(), p.z()}}};
}

RigidTransform transform_from_json(const Json& j) {
  const Json& r = array_of(field(j, "rotation", ""), 4, "rotation");
  const Json& t = array_of(field(j, "translation", ""), 3, "translation");
  std::array<double, 4> q{};
  std::array<double, 3> p{};
  for (std::size_t i = 0; i < 4; ++i) q[i] = number(r[i], "rotation[" + std::to_string(i) + "]");
  for (std::size_t i = 0; i < 3; ++i) p[i] = number(t[i], "translation[" + std::to_string(i) + "]");
  try {
    return RigidTransform::from_xyzw(q, p);
  } catch (const Error& e) {
    throw Error(ErrorCode::kSchemaViolation, std::string("rotation: ") + e.what());
  }
}

Json to_json(const Track2D& track) {
  Json out = Json::array();
  for (const TrackEntry& e : track.entries) out.push_back({e.frame, e.point.u, e.point.v});
  return out;
}

Track2D track_from_json(const Json& j) {
  if (!j.is_array()) violation("track", "expected an array of [frame, u, v]");
  Track2D track;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string path = "track[" + std::to_string(i) + "]";
    const Json& e = array_of(j[i], 3, path);
    track.entries.push_back({integer(e[0], path + "[0]"), {number(e[1], path + "[1]"), number(e[2], path + "[2]")}});
  }
  return track;
}

Json to_json(const Trajectory3D& t) {
  Json out = Json::array();
  for (const Point3& p : t.waypoints) out.push_back({p.x, p.y, p.z});
  return out;
}

Trajectory3D trajectory3d_from_json(const Json& j, Frame frame) {
  if (!j.is_array()) violation("trajectory", "expected an array of [x, y, z]");
  Trajectory3D t;
  t.frame = frame;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string path = "trajectory[" + std::to_string(i) + "]";
    const Json& p = array_of(j[i], 3, path);
    t.waypoints.push_back({number(p[0], path + "[0]"), number(p[1], path + "[1]"), number(p[2], path + "[2]"), frame});
  }
  return t;
}

Json thousand_pairs(const Trajectory2D& t, int width, int height) {
  Json out = Json::array();
  for (const Pixel& p : t.waypoints) {
    const auto q = normalize_thousand(p, width, height);
    out.push_back({q[0], q[1]});
  }
  return out;
}

Json to_json(const GuidancePackage& g) {
  Json out{{"trajectory", to_json(g.trajectory)},
           {"relevant_ids", g.relevant_ids},
           {"sub_instruction", g.sub_instruction},
           {"issue_step", g.issue_step}};
  if (g.degenerate) out["degenerate"] = true;
  return out;
}

GuidancePackage guidance_from_json(const Json& j) {
  GuidancePackage g;
  g.trajectory = trajectory3d_from_json(field(j, "trajectory", ""), Frame::kWorkspace);
  if (g.trajectory.waypoints.size() < 2) violation("trajectory", "at least 2 waypoints required");
  const Json& ids = field(j, "relevant_ids", "");
  if (!ids.is_array()) violation("relevant_ids", "expected an array of strings");
  for (std::size_t i = 0; i < ids.size(); ++i) {
    g.relevant_ids.push_back(string(ids[i], "relevant_ids[" + std::to_string(i) + "]"));
  }
  g.sub_instruction = string(field(j, "sub_instruction", ""), "sub_instruction");
  g.issue_step = integer(field(j, "issue_step", ""), "issue_step");
  if (auto it = j.find("degenerate"); it != j.end()) {
    if (!it->is_boolean()) violation("degenerate", "expected a boolean");
    g.degenerate = it->get<bool>();
  }
  return g;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

Json read_file(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kSchemaViolation, path.string() + ": " + e.what());
  }
}

void write_file(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string s = buf;
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

}  // namespace stguide::json
