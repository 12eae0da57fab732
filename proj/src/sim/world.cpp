#include <random>

#include "stguide/sim.hpp"

namespace stguide::sim {

namespace {

using json::Json;

Eigen::Vector3d vec3(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::kSchemaViolation, path + ": expected [x, y, z]");
  return {json::number(j[0], path + "[0]"), json::number(j[1], path + "[1]"), json::number(j[2], path + "[2]")};
}

Json to_json(const Eigen::Vector3d& v) { return Json::array({v.x(), v.y(), v.z()}); }

// Uniform in [0, 1) from the top 53 bits.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

Eigen::Vector3d SimObject::grasp_point() const { return pose.apply(Eigen::Vector3d(0.0, 0.0, extent.z())); }

const SimObject& WorldState::object(const std::string& id) const {
  auto it = objects.find(id);
  if (it == objects.end()) throw Error(ErrorCode::kUnknownEntity, "unknown object '" + id + "'");
  return it->second;
}

const GoalRegion& WorldState::goal(const std::string& id) const {
  auto it = goals.find(id);
  if (it == goals.end()) throw Error(ErrorCode::kUnknownEntity, "unknown goal '" + id + "'");
  return it->second;
}

bool in_goal(const WorldState& world, const std::string& object, const std::string& goal) {
  const GoalRegion& g = world.goal(goal);
  return (world.object(object).pose.translation() - g.center).norm() <= g.radius;
}

void EpisodeConfig::validate() const {
  if (replan_interval < 1) throw Error(ErrorCode::kConfig, "replan interval H must be >= 1");
  if (max_steps < 1) throw Error(ErrorCode::kConfig, "max steps must be >= 1");
  if (!(step_length > 0.0)) throw Error(ErrorCode::kConfig, "step length must be positive");
  if (!(placement_jitter >= 0.0)) throw Error(ErrorCode::kConfig, "placement jitter must be >= 0");
  if (stages.empty()) throw Error(ErrorCode::kConfig, "at least one stage required");
}

std::string EpisodeConfig::full_instruction() const {
  if (!task_instruction.empty()) return task_instruction;
  std::string out;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (i) out += ", then ";
    out += stages[i].instruction;
  }
  return out;
}

WorldState initial_world(const Scenario& scenario, std::uint64_t seed) {
  WorldState world = scenario.world;
  const double j = scenario.config.placement_jitter;
  if (j > 0.0) {
    std::mt19937_64 rng(seed);
    for (auto& [id, object] : world.objects) {
      const double dx = (2.0 * unit(rng) - 1.0) * j;
      const double dy = (2.0 * unit(rng) - 1.0) * j;
      object.pose = RigidTransform(object.pose.rotation(), object.pose.translation() + Eigen::Vector3d(dx, dy, 0.0));
    }
  }
  world.step = 0;
  return world;
}

Scenario scenario_from_json(const Json& j) {
  Scenario s{json::string(json::field(j, "name", ""), "name"), {},
             {CameraIntrinsics(1, 1, 0, 0, 1, 1), RigidTransform::identity()}, {}};
  const Json& camera = json::field(j, "camera", "");
  s.camera.k = json::intrinsics_from_json(json::field(camera, "intrinsics", "camera"));
  s.camera.workspace_from_camera = json::transform_from_json(json::field(camera, "workspace_from_camera", "camera"));

  const Json& objects = json::field(j, "objects", "");
  if (!objects.is_array()) throw Error(ErrorCode::kSchemaViolation, "objects: expected an array");
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const std::string path = "objects[" + std::to_string(i) + "]";
    const Json& o = objects[i];
    SimObject obj;
    obj.id = json::string(json::field(o, "id", path), path + ".id");
    obj.kind = o.contains("kind") ? json::string(o["kind"], path + ".kind") : "box";
    Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
    if (o.contains("rotation")) {
      const Json& r = o["rotation"];
      if (!r.is_array() || r.size() != 4) throw Error(ErrorCode::kSchemaViolation, path + ".rotation: expected [x, y, z, w]");
      std::array<double, 4> xyzw{};
      for (std::size_t k = 0; k < 4; ++k) xyzw[k] = json::number(r[k], path + ".rotation");
      q = RigidTransform::from_xyzw(xyzw, {0.0, 0.0, 0.0}).rotation();
    }
    obj.pose = RigidTransform(q, vec3(json::field(o, "center", path), path + ".center"));
    obj.extent = vec3(json::field(o, "extent", path), path + ".extent");
    if (!(obj.extent.minCoeff() > 0.0)) throw Error(ErrorCode::kSchemaViolation, path + ".extent: must be > 0");
    if (o.contains("color")) {
      const Json& c = o["color"];
      if (!c.is_array() || c.size() != 3) throw Error(ErrorCode::kSchemaViolation, path + ".color: expected [r, g, b]");
      for (std::size_t k = 0; k < 3; ++k) {
        const int v = json::integer(c[k], path + ".color");
        if (v < 0 || v > 255) throw Error(ErrorCode::kSchemaViolation, path + ".color: outside 0..255");
        obj.color[k] = static_cast<std::uint8_t>(v);
      }
    }
    if (!s.world.objects.emplace(obj.id, obj).second) {
      throw Error(ErrorCode::kSchemaViolation, path + ".id: duplicate '" + obj.id + "'");
    }
  }
  const Json& goals = json::field(j, "goals", "");
  if (!goals.is_array()) throw Error(ErrorCode::kSchemaViolation, "goals: expected an array");
  for (std::size_t i = 0; i < goals.size(); ++i) {
    const std::string path = "goals[" + std::to_string(i) + "]";
    GoalRegion g;
    g.id = json::string(json::field(goals[i], "id", path), path + ".id");
    g.center = vec3(json::field(goals[i], "center", path), path + ".center");
    g.radius = json::number(json::field(goals[i], "radius", path), path + ".radius");
    if (!(g.radius > 0.0)) throw Error(ErrorCode::kSchemaViolation, path + ".radius: must be > 0");
    if (s.world.objects.count(g.id) || !s.world.goals.emplace(g.id, g).second) {
      throw Error(ErrorCode::kSchemaViolation, path + ".id: duplicate '" + g.id + "'");
    }
  }
  const Json& effector = json::field(j, "effector", "");
  s.world.effector.pose = RigidTransform(Eigen::Quaterniond::Identity(),
                                         vec3(json::field(effector, "position", "effector"), "effector.position"));
  if (effector.contains("gripper")) {
    const int g = json::integer(effector["gripper"], "effector.gripper");
    if (g != 0 && g != 1) throw Error(ErrorCode::kSchemaViolation, "effector.gripper: expected 0 or 1");
    s.world.effector.gripper = static_cast<Gripper>(g);
  }

  const Json& e = json::field(j, "episode", "");
  EpisodeConfig& c = s.config;
  for (const auto& [key, value] : e.items()) {
    const std::string path = "episode." + key;
    if (key == "replan_interval") {
      c.replan_interval = json::integer(value, path);
    } else if (key == "max_steps") {
      c.max_steps = json::integer(value, path);
    } else if (key == "step_length") {
      c.step_length = json::number(value, path);
    } else if (key == "placement_jitter") {
      c.placement_jitter = json::number(value, path);
    } else if (key == "stage_loop") {
      if (!value.is_boolean()) throw Error(ErrorCode::kSchemaViolation, path + ": expected a boolean");
      c.stage_loop = value.get<bool>();
    } else if (key == "task_instruction") {
      c.task_instruction = json::string(value, path);
    } else if (key == "mode") {
      const std::string mode = json::string(value, path);
      if (mode == "finetuned") {
        c.mode = AugmentMode::kFinetuned;
      } else if (mode == "frozen") {
        c.mode = AugmentMode::kFrozen;
      } else {
        throw Error(ErrorCode::kSchemaViolation, path + ": expected finetuned or frozen");
      }
    } else if (key == "tube_radius") {
      c.guidance.tube_radius = json::number(value, path);
    } else if (key == "stages") {
      if (!value.is_array()) throw Error(ErrorCode::kSchemaViolation, path + ": expected an array");
      for (std::size_t i = 0; i < value.size(); ++i) {
        const std::string sp = path + "[" + std::to_string(i) + "]";
        c.stages.push_back({json::string(json::field(value[i], "instruction", sp), sp + ".instruction"),
                            json::string(json::field(value[i], "object", sp), sp + ".object"),
                            json::string(json::field(value[i], "goal", sp), sp + ".goal")});
      }
    } else if (key == "disturbances") {
      if (!value.is_array()) throw Error(ErrorCode::kSchemaViolation, path + ": expected an array");
      for (std::size_t i = 0; i < value.size(); ++i) {
        const std::string dp = path + "[" + std::to_string(i) + "]";
        c.disturbances.push_back({json::integer(json::field(value[i], "step", dp), dp + ".step"),
                                  json::string(json::field(value[i], "object", dp), dp + ".object"),
                                  vec3(json::field(value[i], "translation", dp), dp + ".translation")});
      }
    } else {
      throw Error(ErrorCode::kSchemaViolation, path + ": unknown field");
    }
  }
  try {
    c.validate();
  } catch (const Error& err) {
    throw Error(ErrorCode::kSchemaViolation, std::string("episode: ") + err.what());
  }
  for (const StageGoal& g : c.stages) {
    s.world.object(g.object);
    s.world.goal(g.goal);
  }
  for (const Disturbance& d : c.disturbances) s.world.object(d.object);
  return s;
}

Scenario read_scenario(const std::filesystem::path& path) {
  try {
    return scenario_from_json(json::read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

Json to_json(const Keypose& keypose) {
  Json out = json::to_json(keypose.pose);
  out["gripper"] = static_cast<int>(keypose.gripper);
  return out;
}

Keypose keypose_from_json(const Json& j) {
  Keypose k;
  k.pose = json::transform_from_json(j);
  const int g = json::integer(json::field(j, "gripper", ""), "gripper");
  if (g != 0 && g != 1) throw Error(ErrorCode::kSchemaViolation, "gripper: expected 0 or 1");
  k.gripper = static_cast<Gripper>(g);
  return k;
}

Json to_json(const WorldState& world) {
  Json objects = Json::array();
  for (const auto& [id, o] : world.objects) {
    objects.push_back({{"id", id},
                       {"kind", o.kind},
                       {"center", to_json(o.pose.translation())},
                       {"rotation", json::to_json(o.pose)["rotation"]},
                       {"extent", to_json(o.extent)}});
  }
  Json goals = Json::array();
  for (const auto& [id, g] : world.goals) {
    goals.push_back({{"id", id}, {"center", to_json(g.center)}, {"radius", g.radius}});
  }
  return Json{{"step", world.step},
              {"objects", objects},
              {"goals", goals},
              {"effector", {{"position", to_json(world.effector.pose.translation())},
                            {"gripper", static_cast<int>(world.effector.gripper)}}},
              {"held", world.held ? Json(*world.held) : Json(nullptr)}};
}

Json to_json(const EpisodeResult& result) {
  Json trace = Json::array();
  for (const StepRecord& r : result.trace) {
    Json objects = Json::object();
    for (const auto& [id, p] : r.object_positions) objects[id] = to_json(p);
    Json issue = nullptr;
    if (r.issue) {
      issue = {{"reason", r.issue->reason},
               {"sub_instruction", r.issue->sub_instruction},
               {"waypoints", r.issue->waypoints},
               {"degenerate", r.issue->degenerate}};
    }
    trace.push_back({{"step", r.step},
                     {"stage", r.stage},
                     {"issue", issue},
                     {"action", to_json(r.action)},
                     {"relevant_ids", r.relevant_ids},
                     {"effector", to_json(r.effector)},
                     {"held", r.held ? Json(*r.held) : Json(nullptr)},
                     {"objects", objects}});
  }
  Json completed = Json::array();
  for (bool b : result.stage_completed) completed.push_back(b);
  return Json{{"success", result.success},
              {"steps_used", result.steps_used},
              {"stage_completed", completed},
              {"stage_completion_step", result.stage_completion_step},
              {"trace", trace}};
}

}  // namespace stguide::sim
