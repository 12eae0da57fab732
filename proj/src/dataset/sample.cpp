#include <cstdio>
#include <fstream>

#include "stguide/dataset.hpp"

namespace stguide {

namespace {

using json::Json;

[[noreturn]] void violation(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kSchemaViolation, path + ": " + what);
}

std::vector<std::array<int, 2>> parse_pairs(const Json& j, const std::string& path) {
  if (!j.is_array()) violation(path, "expected an array of [u, v] pairs");
  std::vector<std::array<int, 2>> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string sub = path + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != 2) violation(sub, "expected [u, v]");
    out.push_back({json::integer(j[i][0], sub + "[0]"), json::integer(j[i][1], sub + "[1]")});
  }
  return out;
}

}  // namespace

std::string_view task_kind_name(TaskKind kind) {
  switch (kind) {
    case TaskKind::kPointing2D: return "pointing_2d";
    case TaskKind::kTrajectory2D: return "trajectory_2d";
    case TaskKind::kSpatial3D: return "spatial_3d";
    case TaskKind::kDepth3D: return "depth_3d";
    case TaskKind::kPlanning4D: return "planning_4d";
  }
  return "unknown";
}

std::optional<TaskKind> parse_task_kind(std::string_view name) {
  for (TaskKind k : kAllTaskKinds) {
    if (task_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

void validate_sample(const SampleRecord& sample) {
  if (sample.messages.empty()) violation("messages", "at least one message required");
  for (std::size_t i = 0; i < sample.messages.size(); ++i) {
    const char* expected = i % 2 == 0 ? "user" : "assistant";
    if (sample.messages[i].role != expected) {
      violation("messages[" + std::to_string(i) + "].role", std::string("expected '") + expected + "'");
    }
  }
  if (sample.traj_2d) {
    if (sample.traj_2d->size() != static_cast<std::size_t>(kCanonicalLength)) {
      violation("objects.traj_2d", "expected exactly " + std::to_string(kCanonicalLength) + " pairs");
    }
    for (std::size_t i = 0; i < sample.traj_2d->size(); ++i) {
      for (int v : (*sample.traj_2d)[i]) {
        if (v < 0 || v > 1000) violation("objects.traj_2d[" + std::to_string(i) + "]", "outside [0, 1000]");
      }
    }
  }
}

Json to_json(const SampleRecord& sample) {
  Json out;
  Json messages = Json::array();
  for (const Message& m : sample.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  out["messages"] = std::move(messages);
  out["images"] = sample.images;
  if (sample.traj_2d) {
    Json pairs = Json::array();
    for (const auto& p : *sample.traj_2d) pairs.push_back({p[0], p[1]});
    out["objects"] = {{"traj_2d", std::move(pairs)}};
  }
  if (sample.meta) {
    out["meta"] = {{"kind", task_kind_name(sample.meta->kind)},
                   {"task", sample.meta->task},
                   {"variation", sample.meta->variation},
                   {"video", sample.meta->video}};
  }
  return out;
}

SampleRecord sample_from_json(const Json& j) {
  if (!j.is_object()) violation("$", "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (key != "messages" && key != "images" && key != "objects" && key != "meta") {
      violation(key, "unknown field");
    }
  }
  SampleRecord s;
  const Json& messages = json::field(j, "messages", "");
  if (!messages.is_array()) violation("messages", "expected an array");
  for (std::size_t i = 0; i < messages.size(); ++i) {
    const std::string path = "messages[" + std::to_string(i) + "]";
    s.messages.push_back({json::string(json::field(messages[i], "role", path), path + ".role"),
                          json::string(json::field(messages[i], "content", path), path + ".content")});
  }
  const Json& images = json::field(j, "images", "");
  if (!images.is_array()) violation("images", "expected an array");
  for (std::size_t i = 0; i < images.size(); ++i) {
    s.images.push_back(json::string(images[i], "images[" + std::to_string(i) + "]"));
  }
  if (auto it = j.find("objects"); it != j.end()) {
    if (!it->is_object()) violation("objects", "expected an object");
    for (const auto& [key, value] : it->items()) {
      if (key != "traj_2d") violation("objects." + key, "unknown field");
      s.traj_2d = parse_pairs(value, "objects.traj_2d");
    }
  }
  if (auto it = j.find("meta"); it != j.end()) {
    SampleMeta meta;
    const std::string kind = json::string(json::field(*it, "kind", "meta"), "meta.kind");
    const auto parsed = parse_task_kind(kind);
    if (!parsed) violation("meta.kind", "unknown task kind '" + kind + "'");
    meta.kind = *parsed;
    meta.task = json::string(json::field(*it, "task", "meta"), "meta.task");
    meta.variation = json::string(json::field(*it, "variation", "meta"), "meta.variation");
    meta.video = json::string(json::field(*it, "video", "meta"), "meta.video");
    s.meta = std::move(meta);
  }
  validate_sample(s);
  return s;
}

std::vector<std::filesystem::path> write_samples(const std::vector<SampleRecord>& samples,
                                                 const std::filesystem::path& path, SampleFormat format) {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    try {
      validate_sample(samples[i]);
    } catch (const Error& e) {
      throw Error(e.code(), "sample " + std::to_string(i) + ": " + e.what());
    }
  }
  std::vector<std::filesystem::path> written;
  std::error_code ec;
  if (format == SampleFormat::kJsonLines) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::string text;
    for (const SampleRecord& s : samples) text += to_json(s).dump() + "\n";
    json::write_text(path, text);
    written.push_back(path);
    return written;
  }
  std::filesystem::create_directories(path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + path.string() + ": " + ec.message());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "sample_%06zu.json", i);
    const auto file = path / name;
    json::write_file(file, to_json(samples[i]));
    written.push_back(file);
  }
  return written;
}

std::vector<SampleRecord> read_samples_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<SampleRecord> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      out.push_back(sample_from_json(Json::parse(line)));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kSchemaViolation, path.string() + ":" + std::to_string(number) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace stguide
