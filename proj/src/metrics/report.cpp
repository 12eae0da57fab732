#include <cstdio>
#include <fstream>
#include <memory>

#include "stguide/image_io.hpp"
#include "stguide/metrics.hpp"
#include "stguide/trajectory.hpp"

namespace stguide {

namespace {

using json::Json;

std::string record_path(const char* side, std::size_t i, const std::string& key) {
  return std::string(side) + "[" + std::to_string(i) + "]." + key;
}

Pixel point_of(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::kSchemaViolation, path + ": expected [u, v]");
  return {json::number(j[0], path + "[0]"), json::number(j[1], path + "[1]")};
}

std::vector<Pixel> points_of(const Json& j, const std::string& path) {
  if (!j.is_array()) throw Error(ErrorCode::kSchemaViolation, path + ": expected an array of [u, v]");
  std::vector<Pixel> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(point_of(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<Pixel> canonical(const std::vector<Pixel>& points, bool resample) {
  if (!resample || points.size() == static_cast<std::size_t>(kCanonicalLength)) return points;
  return resample_uniform(Trajectory2D{points}, kCanonicalLength).waypoints;
}

const Json& get(const std::vector<Json>& records, const char* side, std::size_t i, const std::string& key) {
  return json::field(records[i], key, std::string(side) + "[" + std::to_string(i) + "]");
}

}  // namespace

std::string_view eval_task_name(EvalTask task) {
  switch (task) {
    case EvalTask::kPointing: return "pointing";
    case EvalTask::kPointingBox: return "pointing_box";
    case EvalTask::kPointingMask: return "pointing_mask";
    case EvalTask::kTrajectory: return "trajectory";
    case EvalTask::kDepth: return "depth";
    case EvalTask::kPlanning: return "planning";
    case EvalTask::kText: return "text";
  }
  return "unknown";
}

std::optional<EvalTask> parse_eval_task(std::string_view name) {
  for (EvalTask t : {EvalTask::kPointing, EvalTask::kPointingBox, EvalTask::kPointingMask, EvalTask::kTrajectory,
                     EvalTask::kDepth, EvalTask::kPlanning, EvalTask::kText}) {
    if (eval_task_name(t) == name) return t;
  }
  return std::nullopt;
}

MetricReport evaluate(EvalTask task, const std::vector<Json>& predicted, const std::vector<Json>& truth,
                      const EvalOptions& options, const ScorerRegistry& registry) {
  if (predicted.size() != truth.size()) {
    throw Error(ErrorCode::kLengthMismatch, std::to_string(predicted.size()) + " predictions vs " +
                                                std::to_string(truth.size()) + " ground-truth records");
  }
  if (predicted.empty()) throw Error(ErrorCode::kEmptySet, "no records to evaluate");
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (!predicted[i].is_object() || !truth[i].is_object()) {
      throw Error(ErrorCode::kSchemaViolation, "record " + std::to_string(i) + ": expected an object");
    }
    auto a = predicted[i].find("id");
    auto b = truth[i].find("id");
    if (a != predicted[i].end() && b != truth[i].end() && *a != *b) {
      throw Error(ErrorCode::kLengthMismatch, "record " + std::to_string(i) + ": ids differ (" + a->dump() +
                                                  " vs " + b->dump() + ")");
    }
  }

  MetricReport report;
  report.task = std::string(eval_task_name(task));
  report.count = predicted.size();
  const std::size_t n = predicted.size();
  switch (task) {
    case EvalTask::kPointing: {
      if (!options.threshold) throw Error(ErrorCode::kInvalidArgument, "pointing SR needs a pixel threshold");
      std::vector<Pixel> p, t;
      for (std::size_t i = 0; i < n; ++i) {
        p.push_back(point_of(get(predicted, "pred", i, "point"), record_path("pred", i, "point")));
        t.push_back(point_of(get(truth, "gt", i, "point"), record_path("gt", i, "point")));
      }
      const PointingStats s = pointing_stats(p, t, *options.threshold);
      report.metrics = {{"MED", s.med}, {"SR", s.sr}};
      report.parameters["threshold_px"] = *options.threshold;
      break;
    }
    case EvalTask::kPointingBox: {
      std::vector<BoxPrediction> preds;
      for (std::size_t i = 0; i < n; ++i) {
        const Json& box = get(truth, "gt", i, "box");
        const std::string path = record_path("gt", i, "box");
        if (!box.is_array() || box.size() != 4) throw Error(ErrorCode::kSchemaViolation, path + ": expected 4 numbers");
        preds.push_back({point_of(get(predicted, "pred", i, "point"), record_path("pred", i, "point")),
                         {json::number(box[0], path), json::number(box[1], path), json::number(box[2], path),
                          json::number(box[3], path)}});
      }
      report.metrics = {{"box_hit_rate", hit_rate_box(preds)}};
      break;
    }
    case EvalTask::kPointingMask: {
      std::vector<std::unique_ptr<BinaryMask>> masks;
      std::vector<MaskPrediction> preds;
      for (std::size_t i = 0; i < n; ++i) {
        std::filesystem::path path = json::string(get(truth, "gt", i, "mask"), record_path("gt", i, "mask"));
        if (path.is_relative()) path = options.mask_root / path;
        masks.push_back(std::make_unique<BinaryMask>(io::read_mask_png(path)));
        preds.push_back({point_of(get(predicted, "pred", i, "point"), record_path("pred", i, "point")),
                         masks.back().get()});
      }
      report.metrics = {{"mask_hit_rate", hit_rate_mask(preds)}};
      break;
    }
    case EvalTask::kTrajectory: {
      std::vector<TrajectoryErrors> errors;
      for (std::size_t i = 0; i < n; ++i) {
        const auto p = canonical(points_of(get(predicted, "pred", i, "trajectory"), record_path("pred", i, "trajectory")),
                                 options.resample);
        const auto t = canonical(points_of(get(truth, "gt", i, "trajectory"), record_path("gt", i, "trajectory")),
                                 options.resample);
        errors.push_back(traj_errors(p, t));
      }
      const TrajectoryErrors e = mean_traj_errors(errors);
      report.metrics = {{"RMSE", e.rmse}, {"MAE", e.mae}};
      report.parameters["resample"] = options.resample;
      break;
    }
    case EvalTask::kDepth: {
      std::vector<DepthPrediction> preds;
      for (std::size_t i = 0; i < n; ++i) {
        preds.push_back({json::number(get(predicted, "pred", i, "depth"), record_path("pred", i, "depth")),
                         json::number(get(truth, "gt", i, "depth"), record_path("gt", i, "depth"))});
      }
      const DepthMetrics m = depth_metrics(preds);
      report.metrics = {{"ratio_accuracy", m.ratio_accuracy}, {"MAD_cm", m.mad_cm}};
      report.parameters["ratio_threshold"] = kDepthRatioThreshold;
      break;
    }
    case EvalTask::kPlanning: {
      std::vector<PlanningPrediction> preds;
      for (std::size_t i = 0; i < n; ++i) {
        PlanningPrediction p;
        p.predicted_step = json::integer(get(predicted, "pred", i, "step"), record_path("pred", i, "step"));
        p.true_step = json::integer(get(truth, "gt", i, "step"), record_path("gt", i, "step"));
        const Json& pf = get(predicted, "pred", i, "finished");
        const Json& tf = get(truth, "gt", i, "finished");
        if (!pf.is_boolean() || !tf.is_boolean()) {
          throw Error(ErrorCode::kSchemaViolation, "record " + std::to_string(i) + ".finished: expected a boolean");
        }
        p.predicted_finished = pf.get<bool>();
        p.true_finished = tf.get<bool>();
        if (predicted[i].contains("trajectory") && truth[i].contains("trajectory")) {
          p.predicted_trajectory = canonical(points_of(predicted[i]["trajectory"], record_path("pred", i, "trajectory")),
                                             options.resample);
          p.true_trajectory =
              canonical(points_of(truth[i]["trajectory"], record_path("gt", i, "trajectory")), options.resample);
        }
        preds.push_back(std::move(p));
      }
      const PlanningMetrics m = planning_metrics(preds);
      report.metrics = {{"StepAcc", m.step_acc}, {"StepMAE", m.step_mae}, {"StatusAcc", m.status_acc}};
      if (m.trajectory) {
        report.metrics.emplace_back("RMSE", m.trajectory->rmse);
        report.metrics.emplace_back("MAE", m.trajectory->mae);
      }
      break;
    }
    case EvalTask::kText: {
      const TextScorer& scorer = registry.get(options.scorer);
      ExactSum total;
      for (std::size_t i = 0; i < n; ++i) {
        total.add(scorer(json::string(get(predicted, "pred", i, "text"), record_path("pred", i, "text")),
                         json::string(get(truth, "gt", i, "text"), record_path("gt", i, "text"))));
      }
      report.metrics = {{"text_similarity", total.value() / static_cast<double>(n)}};
      report.parameters["scorer"] = options.scorer;
      break;
    }
  }
  return report;
}

Json to_json(const MetricReport& report) {
  Json metrics = Json::object();
  for (const auto& [name, value] : report.metrics) metrics[name] = value;
  return Json{{"task", report.task}, {"count", report.count}, {"metrics", metrics}, {"parameters", report.parameters}};
}

std::string to_text_table(const MetricReport& report) {
  std::size_t width = 6;
  for (const auto& [name, value] : report.metrics) width = std::max(width, name.size());
  std::string out = report.task + " (n=" + std::to_string(report.count) + ")\n";
  for (const auto& [name, value] : report.metrics) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    out += "  " + name + std::string(width - name.size() + 2, ' ') + buf + "\n";
  }
  return out;
}

std::vector<Json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<Json> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kSchemaViolation, path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace stguide
