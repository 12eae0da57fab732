#include <algorithm>
#include <set>

#include "stguide/dataset.hpp"

namespace stguide {

namespace {

std::vector<std::string> string_list(const json::Json& j, const std::string& path) {
  if (!j.is_array()) throw Error(ErrorCode::kSchemaViolation, path + ": expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(json::string(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace

void SplitSpec::validate() const {
  std::set<std::string> names;
  for (const TaskSplit& t : tasks) {
    if (!names.insert(t.task).second) {
      throw Error(ErrorCode::kSchemaViolation, "split '" + name + "': duplicate task '" + t.task + "'");
    }
    const std::set<std::string> seen(t.seen.begin(), t.seen.end());
    for (const std::string& v : t.unseen) {
      if (seen.count(v)) {
        throw Error(ErrorCode::kSchemaViolation,
                    "split '" + name + "': variation '" + v + "' of '" + t.task + "' is both seen and unseen");
      }
    }
  }
}

const TaskSplit* SplitSpec::find(std::string_view task) const {
  auto it = std::find_if(tasks.begin(), tasks.end(), [&](const TaskSplit& t) { return t.task == task; });
  return it == tasks.end() ? nullptr : &*it;
}

SplitSpec split_from_json(const json::Json& j) {
  SplitSpec spec;
  if (auto it = j.find("name"); it != j.end()) spec.name = json::string(*it, "name");
  const json::Json& tasks = json::field(j, "tasks", "");
  if (!tasks.is_array()) throw Error(ErrorCode::kSchemaViolation, "tasks: expected an array");
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const std::string path = "tasks[" + std::to_string(i) + "]";
    TaskSplit t;
    t.task = json::string(json::field(tasks[i], "task", path), path + ".task");
    t.seen = string_list(json::field(tasks[i], "seen", path), path + ".seen");
    t.unseen = string_list(json::field(tasks[i], "unseen", path), path + ".unseen");
    spec.tasks.push_back(std::move(t));
  }
  spec.validate();
  return spec;
}

SplitSpec read_split(const std::filesystem::path& path) {
  try {
    return split_from_json(json::read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

SplitResult apply_split(const std::vector<SampleRecord>& samples, const SplitSpec& spec) {
  SplitResult result;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const SampleRecord& s = samples[i];
    if (!s.meta) {
      throw Error(ErrorCode::kUnknownVariation, "sample " + std::to_string(i) + " carries no variation label");
    }
    const TaskSplit* task = spec.find(s.meta->task);
    if (!task) {
      throw Error(ErrorCode::kUnknownVariation, "task '" + s.meta->task + "' is not in split '" + spec.name + "'");
    }
    const std::string& v = s.meta->variation;
    SplitCounts& counts = result.per_task[task->task];
    if (std::find(task->seen.begin(), task->seen.end(), v) != task->seen.end()) {
      result.seen.push_back(s);
      ++counts.seen;
    } else if (std::find(task->unseen.begin(), task->unseen.end(), v) != task->unseen.end()) {
      result.unseen.push_back(s);
      ++counts.unseen;
    } else {
      throw Error(ErrorCode::kUnknownVariation,
                  "variation '" + v + "' of task '" + task->task + "' is neither seen nor unseen");
    }
  }
  return result;
}

}  // namespace stguide
