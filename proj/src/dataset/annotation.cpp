#include <charconv>

#include "stguide/dataset.hpp"

namespace stguide {

namespace {

using json::Json;

[[noreturn]] void violation(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kSchemaViolation, path + ": " + what);
}

int parse_frame(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return j.get<int>();
  if (!j.is_string()) violation(path, "expected \"frameN\" or an integer");
  const std::string s = j.get<std::string>();
  constexpr std::string_view prefix = "frame";
  const std::size_t offset = s.rfind(prefix, 0) == 0 ? prefix.size() : 0;
  int value = 0;
  const char* first = s.data() + offset;
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) violation(path, "malformed frame label '" + s + "'");
  return value;
}

CoordinateEntry parse_coordinate(const std::string& key, const Json& j, const std::string& path) {
  if (!j.is_object()) violation(path, "expected an object");
  CoordinateEntry e;
  e.key = key;
  for (const auto& [name, value] : j.items()) {
    const std::string sub = path + "." + name;
    if (name == "text") {
      e.text = json::string(value, sub);
    } else if (name == "image_coordinates") {
      if (!value.is_array() || value.size() != 2) violation(sub, "expected [u, v]");
      e.image_coordinates = std::array<int, 2>{json::integer(value[0], sub + "[0]"), json::integer(value[1], sub + "[1]")};
    } else if (name == "cartesian_coordinates") {
      if (!value.is_array() || value.size() != 6) violation(sub, "expected a 6-vector");
      std::array<double, 6> c{};
      for (std::size_t i = 0; i < 6; ++i) c[i] = json::number(value[i], sub + "[" + std::to_string(i) + "]");
      e.cartesian_coordinates = c;
    } else {
      e.extras[name] = value;
    }
  }
  return e;
}

ArmDescription parse_arm(const Json& j, const std::string& path) {
  if (!j.is_object()) violation(path, "expected an object");
  ArmDescription arm;
  bool has_text = false;
  for (const auto& [name, value] : j.items()) {
    const std::string sub = path + "." + name;
    if (name == "action_description") {
      arm.action_description = json::string(value, sub);
      has_text = true;
    } else if (name == "coordinate_description") {
      if (!value.is_object()) violation(sub, "expected an object");
      for (const auto& [key, entry] : value.items()) {
        arm.coordinates.push_back(parse_coordinate(key, entry, sub + "." + key));
      }
    } else {
      arm.extras[name] = value;
    }
  }
  if (!has_text) violation(path + ".action_description", "missing field");
  return arm;
}

ActionRecord parse_action(const Json& j, const std::string& path) {
  if (!j.is_object()) violation(path, "expected an object");
  ActionRecord a;
  bool has_range = false;
  for (const auto& [name, value] : j.items()) {
    const std::string sub = path + "." + name;
    if (name == "frame_range") {
      a.start_frame = parse_frame(json::field(value, "start_frame", sub), sub + ".start_frame");
      a.end_frame = parse_frame(json::field(value, "end_frame", sub), sub + ".end_frame");
      has_range = true;
    } else if (name == "left_description") {
      a.left = parse_arm(value, sub);
    } else if (name == "right_description") {
      a.right = parse_arm(value, sub);
    } else {
      a.extras[name] = value;
    }
  }
  if (!has_range) violation(path + ".frame_range", "missing field");
  if (a.end_frame < a.start_frame) violation(path + ".frame_range", "end_frame precedes start_frame");
  if (!a.left && !a.right) violation(path, "needs left_description or right_description");
  return a;
}

std::optional<std::array<double, 4>> parse_matrix(const std::string& raw) {
  const Json m = Json::parse(raw, nullptr, false);
  if (m.is_discarded() || !m.is_array() || m.size() != 3) return std::nullopt;
  for (const Json& row : m) {
    if (!row.is_array() || row.size() != 3) return std::nullopt;
    for (const Json& v : row) {
      if (!v.is_number()) return std::nullopt;
    }
  }
  return std::array<double, 4>{m[0][0].get<double>(), m[1][1].get<double>(), m[0][2].get<double>(),
                               m[1][2].get<double>()};
}

}  // namespace

std::string ActionRecord::description() const {
  if (left) return left->action_description;
  if (right) return right->action_description;
  return {};
}

AnnotationRecord parse_annotation(const Json& document) {
  if (!document.is_object()) violation("$", "expected an object");
  AnnotationRecord r;
  bool has_task = false;
  bool has_actions = false;
  for (const auto& [name, value] : document.items()) {
    if (name == "task_description") {
      r.task_description = json::string(value, name);
      has_task = true;
    } else if (name == "action_descriptions") {
      if (!value.is_array()) violation(name, "expected an array");
      for (std::size_t i = 0; i < value.size(); ++i) {
        r.actions.push_back(parse_action(value[i], name + "[" + std::to_string(i) + "]"));
      }
      has_actions = true;
    } else if (name == "parameter_data") {
      if (!value.is_object()) violation(name, "expected an object");
      for (const auto& [key, param] : value.items()) {
        if (key == "camera_intrinsics") {
          r.camera_intrinsics_raw = param.is_string() ? param.get<std::string>() : param.dump();
          r.intrinsics_matrix = parse_matrix(r.camera_intrinsics_raw);
        } else {
          r.extras["parameter_data"][key] = param;
        }
      }
    } else {
      r.extras[name] = value;
    }
  }
  if (!has_task) violation("task_description", "missing field");
  if (!has_actions) violation("action_descriptions", "missing field");
  if (r.actions.empty()) violation("action_descriptions", "at least one action required");
  for (std::size_t i = 1; i < r.actions.size(); ++i) {
    if (r.actions[i].start_frame <= r.actions[i - 1].end_frame) {
      violation("action_descriptions[" + std::to_string(i) + "].frame_range",
                "overlaps or precedes the previous action");
    }
  }
  return r;
}

AnnotationRecord read_annotation(const std::filesystem::path& path) {
  const Json doc = json::read_file(path);
  try {
    return parse_annotation(doc);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace stguide
