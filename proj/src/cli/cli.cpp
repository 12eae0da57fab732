#include <algorithm>
#include <cstdlib>
#include <deque>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "stguide/cli.hpp"
#include "stguide/dataset.hpp"
#include "stguide/guidance.hpp"
#include "stguide/image_io.hpp"
#include "stguide/metrics.hpp"
#include "stguide/sim.hpp"
#include "stguide/trajectory.hpp"

namespace stguide::cli {

namespace {

namespace fs = std::filesystem;
using json::Json;

struct ImageSize {
  int width;
  int height;
};

void log(const RunConfig& rc, std::ostream& err, const std::string& message) {
  if (rc.verbosity > 0) err << "stguide: " << message << "\n";
}

void emit(const fs::path& path, const Json& j, std::ostream& out) {
  if (path == "-") {
    out << j.dump(2) << "\n";
  } else {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    json::write_file(path, j);
  }
}

Json trajectory_points(const Trajectory3D& t) {
  Json out = Json::array();
  for (const Point3& p : t.waypoints) out.push_back({p.x, p.y, p.z});
  return out;
}

double resolved_sigma(const RunConfig& rc, std::optional<ImageSize> size) {
  if (auto s = rc.real("sigma")) return *s;
  return size ? default_sigma(size->width, size->height) : 0.0;
}

// Every numeric default that shapes a run, resolved against the image size
// when one is known ("auto" otherwise).
Json defaults_block(const RunConfig& rc, std::optional<ImageSize> size) {
  const GuidanceParams g;
  const sim::EpisodeConfig e;
  Json j;
  j["tube_radius"] = rc.real("tube_radius").value_or(g.tube_radius);
  j["tube_shape"] = rc.word("tube_shape").value_or("capsule");
  if (rc.real("sigma") || size) {
    j["sigma"] = resolved_sigma(rc, size);
  } else {
    j["sigma"] = "auto";
  }
  if (auto eps = rc.real("epsilon")) {
    j["epsilon"] = *eps;
  } else if (size) {
    j["epsilon"] = default_epsilon(size->width, size->height);
  } else {
    j["epsilon"] = "auto";
  }
  j["replan_interval"] = rc.integer("replan_interval").value_or(e.replan_interval);
  j["alpha"] = rc.real("alpha").value_or(g.alpha);
  j["endpoint_radius"] = rc.real("endpoint_radius").value_or(g.endpoint_radius);
  j["line_width"] = rc.integer("line_width").value_or(g.line_width);
  j["degree"] = rc.integer("degree").value_or(kSmoothingDegree);
  j["k"] = rc.integer("k").value_or(kCanonicalLength);
  j["anchor_tolerance"] = rc.real("anchor_tolerance").value_or(LiftOptions{}.anchor_tolerance);
  j["step_length"] = rc.real("step_length").value_or(e.step_length);
  j["max_steps"] = rc.integer("max_steps").value_or(e.max_steps);
  j["inpaint_threshold"] = g.inpaint.threshold;
  j["inpaint_max_iterations"] = g.inpaint.max_iterations;
  j["inpaint_tolerance"] = g.inpaint.tolerance;
  j["rgb_kappa"] = g.inpaint.rgb_kappa;
  return j;
}

GuidanceParams guidance_params(const RunConfig& rc, GuidanceParams g = {}) {
  if (auto v = rc.real("tube_radius")) g.tube_radius = *v;
  if (auto v = rc.word("tube_shape")) g.tube_shape = *v == "balls" ? TubeShape::kBallUnion : TubeShape::kCapsuleChain;
  if (auto v = rc.real("sigma")) g.sigma = *v;
  if (auto v = rc.real("alpha")) g.alpha = *v;
  if (auto v = rc.real("endpoint_radius")) g.endpoint_radius = *v;
  if (auto v = rc.integer("line_width")) g.line_width = *v;
  return g;
}

AugmentMode mode_of(const RunConfig& rc, AugmentMode fallback) {
  if (auto m = rc.word("mode")) return *m == "frozen" ? AugmentMode::kFrozen : AugmentMode::kFinetuned;
  return fallback;
}

ExtractOptions extract_options(const RunConfig& rc, bool allow_nonstandard) {
  ExtractOptions o;
  o.epsilon = rc.real("epsilon");
  o.degree = rc.integer("degree").value_or(kSmoothingDegree);
  o.k = rc.integer("k").value_or(kCanonicalLength);
  if (!allow_nonstandard && o.k != kCanonicalLength) {
    throw Error(ErrorCode::kConfig, "k = " + std::to_string(o.k) + " differs from the canonical " +
                                        std::to_string(kCanonicalLength) + "; pass --allow-nonstandard");
  }
  if (!allow_nonstandard && o.degree != kSmoothingDegree) {
    throw Error(ErrorCode::kConfig, "degree = " + std::to_string(o.degree) + " differs from the canonical " +
                                        std::to_string(kSmoothingDegree) + "; pass --allow-nonstandard");
  }
  return o;
}

Json trace_json(const StageTrace& t) {
  Json stages = Json::array();
  for (const StageRecord& s : t.stages) {
    Json r{{"name", s.name}, {"input_count", s.input_count}, {"output_count", s.output_count}};
    if (!s.note.empty()) r["note"] = s.note;
    stages.push_back(r);
  }
  return Json{{"stages", stages},
              {"epsilon", t.epsilon},
              {"degree_requested", t.degree_requested},
              {"degree_used", t.degree_used},
              {"degree_degraded", t.degree_degraded},
              {"degenerate_motion", t.degenerate_motion},
              {"k", t.k}};
}

// ---- extract --------------------------------------------------------------

int cmd_extract(const RunConfig& rc, bool allow_nonstandard, const std::string& weights, std::ostream& out) {
  const ExtractOptions base = extract_options(rc, allow_nonstandard);
  const Track2D track = json::track_from_json(json::read_file(rc.inputs.at("track")));
  const CameraIntrinsics k = json::intrinsics_from_json(json::read_file(rc.inputs.at("intrinsics")));
  const DepthMap depth = io::read_depth(rc.inputs.at("depth"));
  ExtractOptions options = base;
  options.weights = weights == "endpoint" ? WeightProfile::kEndpointEmphasis : WeightProfile::kUniform;
  const ExtractResult r = extract(track, depth, k, options);
  Json j{{"trajectory", trajectory_points(r.trajectory)},
         {"frame", "camera"},
         {"trace", trace_json(r.trace)},
         {"defaults", defaults_block(rc, ImageSize{k.width(), k.height()})}};
  j["defaults"]["weights"] = weights;
  emit(rc.outputs.at("out"), j, out);
  return kExitOk;
}

// ---- lift -----------------------------------------------------------------

int cmd_lift(const RunConfig& rc, bool thousand, std::ostream& out) {
  const CameraIntrinsics k = json::intrinsics_from_json(json::read_file(rc.inputs.at("intrinsics")));
  const DepthMap depth = io::read_depth(rc.inputs.at("depth"));
  const Json pj = json::read_file(rc.inputs.at("pixels"));
  if (!pj.is_array()) throw Error(ErrorCode::kSchemaViolation, "pixels: expected an array of [u, v]");
  Trajectory2D pixels;
  for (std::size_t i = 0; i < pj.size(); ++i) {
    const std::string path = "pixels[" + std::to_string(i) + "]";
    if (!pj[i].is_array() || pj[i].size() != 2) throw Error(ErrorCode::kSchemaViolation, path + ": expected [u, v]");
    if (thousand) {
      pixels.waypoints.push_back(
          denormalize_thousand({json::integer(pj[i][0], path), json::integer(pj[i][1], path)}, k.width(), k.height()));
    } else {
      pixels.waypoints.push_back({json::number(pj[i][0], path), json::number(pj[i][1], path)});
    }
  }
  const Json aj = json::read_file(rc.inputs.at("anchor"));
  DepthAnchor anchor;
  anchor.d_start = json::number(json::field(aj, "d_start", "anchor"), "anchor.d_start");
  const Json& offsets = json::field(aj, "offsets", "anchor");
  if (!offsets.is_array()) throw Error(ErrorCode::kSchemaViolation, "anchor.offsets: expected an array");
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    anchor.offsets.push_back(json::number(offsets[i], "anchor.offsets[" + std::to_string(i) + "]"));
  }
  LiftOptions options;
  if (auto t = rc.real("anchor_tolerance")) options.anchor_tolerance = *t;
  const Trajectory3D t = lift_2d(pixels, depth, k, anchor, options);
  Json j{{"trajectory", trajectory_points(t)},
         {"frame", "camera"},
         {"defaults", defaults_block(rc, ImageSize{k.width(), k.height()})}};
  emit(rc.outputs.at("out"), j, out);
  return kExitOk;
}

// ---- augment --------------------------------------------------------------

int cmd_augment(const RunConfig& rc, const std::vector<std::pair<std::string, fs::path>>& masks, std::ostream& out) {
  const CameraIntrinsics k = json::intrinsics_from_json(json::read_file(rc.inputs.at("intrinsics")));
  RigidTransform workspace_from_camera;
  if (rc.inputs.count("extrinsics")) {
    workspace_from_camera = json::transform_from_json(json::read_file(rc.inputs.at("extrinsics")));
  }
  Observation obs{io::read_rgb_png(rc.inputs.at("rgb")), io::read_depth(rc.inputs.at("depth")), {}};
  for (const auto& [id, path] : masks) obs.masks.push_back({id, io::read_mask_png(path), "file"});
  const GuidancePackage guidance = json::guidance_from_json(json::read_file(rc.inputs.at("guidance")));
  const AugmentMode mode = mode_of(rc, AugmentMode::kFinetuned);
  const AugmentedObservation a = augment(obs, guidance, mode, k, workspace_from_camera, guidance_params(rc));

  const fs::path dir = rc.outputs.at("out-dir");
  fs::create_directories(dir);
  io::write_rgb_png(dir / "rgb.png", a.rgb);
  io::write_float_raster(dir / "depth.strf", a.depth);
  io::write_float_raster(dir / "weights.strf", a.weights);
  Json manifest{{"mode", mode == AugmentMode::kFrozen ? "frozen" : "finetuned"},
                {"relevant_ids", a.relevant_ids},
                {"fallback_id", a.fallback_id ? Json(*a.fallback_id) : Json(nullptr)},
                {"no_relevant_mask", a.no_relevant_mask},
                {"outputs", {{"rgb", "rgb.png"}, {"depth", "depth.strf"}, {"weights", "weights.strf"}}},
                {"defaults", defaults_block(rc, ImageSize{k.width(), k.height()})}};
  json::write_file(dir / "manifest.json", manifest);
  out << (dir / "manifest.json").string() << "\n";
  return kExitOk;
}

// ---- gen-dataset ----------------------------------------------------------

std::optional<Track2D> read_track(const fs::path& path) {
  if (!fs::exists(path)) return std::nullopt;
  return json::track_from_json(json::read_file(path));
}

std::optional<DepthMap> read_frame_depth(const fs::path& dir, int frame) {
  char name[32];
  std::snprintf(name, sizeof name, "frame_%03d", frame);
  for (const char* ext : {".png", ".strf"}) {
    const fs::path p = dir / (std::string(name) + ext);
    if (fs::exists(p)) return io::read_depth(p);
  }
  return std::nullopt;
}

std::vector<TaskKind> parse_kinds(const std::string& text) {
  if (text.empty() || text == "all") return {kAllTaskKinds.begin(), kAllTaskKinds.end()};
  std::vector<TaskKind> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::optional<TaskKind> kind = parse_task_kind(item);
    if (!kind) {
      for (TaskKind k : kAllTaskKinds) {
        const std::string_view name = task_kind_name(k);
        if (name.substr(0, name.find('_')) == item) kind = k;
      }
    }
    if (!kind) throw Error(ErrorCode::kConfig, "--kinds: unknown task kind '" + item + "'");
    if (std::find(out.begin(), out.end(), *kind) == out.end()) out.push_back(*kind);
  }
  std::sort(out.begin(), out.end());
  return out;
}

int cmd_gen_dataset(const RunConfig& rc, const std::string& kinds_text, const std::string& format_text,
                    std::ostream& out, std::ostream& err) {
  const std::vector<TaskKind> kinds = parse_kinds(kinds_text);
  const SampleFormat format = format_text == "documents" ? SampleFormat::kDocuments : SampleFormat::kJsonLines;
  const fs::path data = rc.inputs.at("root") / "data";
  if (!fs::is_directory(data)) throw Error(ErrorCode::kIo, "--root: no data/ directory under " + rc.inputs.at("root").string());
  std::optional<SplitSpec> split;
  if (rc.inputs.count("split")) split = read_split(rc.inputs.at("split"));
  const PromptTemplates templates =
      rc.inputs.count("templates") ? PromptTemplates::load(rc.inputs.at("templates")) : PromptTemplates::bundled();

  std::vector<fs::path> videos;
  for (const auto& entry : fs::directory_iterator(data)) {
    if (entry.is_directory() && fs::exists(entry.path() / "info.json")) videos.push_back(entry.path());
  }
  std::sort(videos.begin(), videos.end());
  if (videos.empty()) throw Error(ErrorCode::kIo, "no data/<id>/info.json under " + data.string());

  auto want = [&](TaskKind k) { return std::find(kinds.begin(), kinds.end(), k) != kinds.end(); };
  std::vector<SampleRecord> samples;
  Json skipped = Json::array();
  for (const fs::path& dir : videos) {
    const std::string video = dir.filename().string();
    log(rc, err, "video " + video);
    AnnotationRecord record;
    CameraIntrinsics k(1, 1, 0, 0, 1, 1);
    try {
      record = read_annotation(dir / "info.json");
      k = json::intrinsics_from_json(json::read_file(dir / "intrinsics.json"));
    } catch (const Error& e) {
      throw Error(e.code(), "data/" + video + ": " + e.what());
    }
    GenerationOptions options;
    options.video = video;
    options.extract = extract_options(rc, false);
    if (auto v = rc.real("consistency_px")) options.consistency_px = *v;
    if (auto v = rc.real("dead_zone")) options.dead_zone = *v;
    if (auto v = rc.real("anchor_tolerance")) options.lift.anchor_tolerance = *v;
    if (fs::exists(dir / "extrinsics.json")) {
      options.camera_from_annotation = json::transform_from_json(json::read_file(dir / "extrinsics.json"));
    }
    std::optional<std::string> task_name;
    if (fs::exists(dir / "meta.json")) {
      const Json meta = json::read_file(dir / "meta.json");
      if (meta.contains("task")) task_name = json::string(meta["task"], "meta.task");
      if (meta.contains("variation")) options.variation = json::string(meta["variation"], "meta.variation");
    }

    std::vector<std::optional<Track2D>> tracks;
    std::vector<std::optional<DepthMap>> depths;
    std::vector<std::optional<std::vector<std::array<int, 2>>>> traj_2d;
    for (std::size_t i = 0; i < record.actions.size(); ++i) {
      tracks.push_back(read_track(dir / "tracks" / ("action_" + std::to_string(i) + ".json")));
      depths.push_back(want(TaskKind::kDepth3D) ? read_frame_depth(dir / "depth", record.actions[i].start_frame)
                                                : std::nullopt);
      std::optional<std::vector<std::array<int, 2>>> pairs;
      if (tracks.back() && want(TaskKind::kPlanning4D)) {
        try {
          const Extract2DResult r = extract_2d(*tracks.back(), k.width(), k.height(), options.extract);
          std::vector<std::array<int, 2>> p;
          for (const Pixel& px : r.trajectory.waypoints) {
            p.push_back(normalize_thousand({std::clamp(px.u, 0.0, static_cast<double>(k.width())),
                                            std::clamp(px.v, 0.0, static_cast<double>(k.height()))},
                                           k.width(), k.height()));
          }
          pairs = std::move(p);
        } catch (const Error&) {
        }
      }
      traj_2d.push_back(std::move(pairs));
    }

    GenerationReport report;
    if (want(TaskKind::kPointing2D)) report.append(gen_pointing(record, k, templates, options));
    if (want(TaskKind::kTrajectory2D)) {
      report.append(gen_trajectory(record, tracks, k.width(), k.height(), templates, options));
    }
    if (want(TaskKind::kSpatial3D)) report.append(gen_spatial(record, templates, options));
    if (want(TaskKind::kDepth3D)) report.append(gen_depth(record, tracks, depths, k, templates, options));
    if (want(TaskKind::kPlanning4D)) report.append(gen_planning(record, traj_2d, templates, options));
    for (SampleRecord& s : report.samples) {
      if (task_name && s.meta) s.meta->task = *task_name;
      samples.push_back(std::move(s));
    }
    for (const SkippedSample& s : report.skipped) {
      skipped.push_back({{"video", video},
                         {"kind", std::string(task_kind_name(s.kind))},
                         {"reference", s.reference},
                         {"reason", s.reason}});
    }
  }

  std::map<std::string, std::vector<SampleRecord>> partitions;
  if (split) {
    SplitResult r = apply_split(samples, *split);
    partitions["seen"] = std::move(r.seen);
    partitions["unseen"] = std::move(r.unseen);
  } else {
    partitions["all"] = std::move(samples);
  }

  const fs::path out_dir = rc.outputs.at("out");
  fs::create_directories(out_dir);
  Json counts = Json::object();
  Json shards = Json::array();
  for (TaskKind kind : kinds) {
    const std::string name(task_kind_name(kind));
    Json per_split = Json::object();
    for (const auto& [part, list] : partitions) {
      std::vector<SampleRecord> selected;
      for (const SampleRecord& s : list) {
        if (s.meta && s.meta->kind == kind) selected.push_back(s);
      }
      per_split[part] = selected.size();
      if (selected.empty()) continue;
      const fs::path rel = format == SampleFormat::kDocuments ? fs::path(name) / part : fs::path(name) / (part + ".jsonl");
      fs::create_directories((out_dir / rel).parent_path());
      write_samples(selected, out_dir / rel, format);
      shards.push_back(rel.generic_string());
    }
    counts[name] = per_split;
  }
  Json manifest{{"split", split ? Json(split->name) : Json(nullptr)},
                {"format", format == SampleFormat::kDocuments ? "documents" : "jsonl"},
                {"videos", videos.size()},
                {"counts", counts},
                {"shards", shards},
                {"skipped", skipped},
                {"defaults", defaults_block(rc, std::nullopt)}};
  GenerationOptions g;
  manifest["defaults"]["consistency_px"] = rc.real("consistency_px").value_or(g.consistency_px);
  manifest["defaults"]["dead_zone"] = rc.real("dead_zone").value_or(g.dead_zone);
  manifest["defaults"]["depth_decimals"] = g.depth_decimals;
  json::write_file(out_dir / "manifest.json", manifest);
  out << (out_dir / "manifest.json").string() << "\n";
  return kExitOk;
}

// ---- eval -----------------------------------------------------------------

int cmd_eval(const RunConfig& rc, const std::string& task_text, bool resample, bool table, std::ostream& out) {
  const auto task = parse_eval_task(task_text);
  if (!task) throw Error(ErrorCode::kConfig, "--task: unknown task '" + task_text + "'");
  EvalOptions options;
  options.threshold = rc.real("threshold");
  if (*task == EvalTask::kPointing && !options.threshold) {
    throw Error(ErrorCode::kConfig, "--threshold is required for pointing (no default pixel threshold)");
  }
  options.resample = resample;
  options.scorer = rc.word("scorer").value_or(std::string(kDefaultScorer));
  if (rc.inputs.count("mask-root")) options.mask_root = rc.inputs.at("mask-root");
  const ScorerRegistry registry = ScorerRegistry::with_defaults();
  const MetricReport report =
      evaluate(*task, read_jsonl(rc.inputs.at("pred")), read_jsonl(rc.inputs.at("gt")), options, registry);
  Json j = to_json(report);
  j["defaults"] = defaults_block(rc, std::nullopt);
  const fs::path path = rc.outputs.count("out") ? rc.outputs.at("out") : fs::path("-");
  emit(path, j, out);
  if (table) out << to_text_table(report);
  return kExitOk;
}

// ---- simulate -------------------------------------------------------------

std::vector<std::string> split_command(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  std::string word;
  while (in >> word) out.push_back(word);
  return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    try {
      std::size_t used = 0;
      if (dash != std::string::npos && dash > 0) {
        const std::uint64_t a = std::stoull(item.substr(0, dash), &used);
        const std::uint64_t b = std::stoull(item.substr(dash + 1));
        if (b < a) throw std::invalid_argument("range");
        for (std::uint64_t s = a; s <= b; ++s) out.push_back(s);
      } else {
        out.push_back(std::stoull(item, &used));
        if (used != item.size()) throw std::invalid_argument("trailing");
      }
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kConfig, "--seeds: bad seed list '" + text + "'");
    }
  }
  if (out.empty()) throw Error(ErrorCode::kConfig, "--seeds: empty seed list");
  return out;
}

int cmd_simulate(const RunConfig& rc, const std::vector<fs::path>& scenario_paths, const std::string& seeds_text,
                 const std::string& stage_loop, const std::string& planner_exec, const std::string& policy_exec,
                 std::ostream& out, std::ostream& err) {
  std::vector<std::uint64_t> seeds;
  if (!seeds_text.empty()) {
    seeds = parse_seeds(seeds_text);
  } else {
    seeds = {static_cast<std::uint64_t>(rc.integer("seed").value_or(0))};
  }
  std::vector<sim::Scenario> scenarios;
  for (const fs::path& p : scenario_paths) {
    sim::Scenario s = sim::read_scenario(p);
    sim::EpisodeConfig& c = s.config;
    if (auto v = rc.integer("replan_interval")) c.replan_interval = *v;
    if (auto v = rc.integer("max_steps")) c.max_steps = *v;
    if (auto v = rc.real("step_length")) c.step_length = *v;
    if (!stage_loop.empty()) c.stage_loop = stage_loop == "on";
    c.mode = mode_of(rc, c.mode);
    c.guidance = guidance_params(rc, c.guidance);
    c.validate();
    scenarios.push_back(std::move(s));
  }
  const fs::path out_dir = rc.outputs.at("out-dir");
  fs::create_directories(out_dir);

  const std::vector<std::string> planner_argv = split_command(planner_exec);
  const std::vector<std::string> policy_argv = split_command(policy_exec);
  std::string current;
  sim::PlannerFactory planners = [&]() -> std::unique_ptr<sim::Planner> {
    if (planner_argv.empty()) return std::make_unique<sim::MockPlanner>();
    return std::make_unique<sim::ExecPlanner>(planner_argv, out_dir / "plugin" / current);
  };
  sim::PolicyFactory policies = [&](const sim::Scenario& s) -> std::unique_ptr<sim::Policy> {
    if (policy_argv.empty()) return std::make_unique<sim::MockPolicy>(s.config.step_length);
    return std::make_unique<sim::ExecPolicy>(policy_argv, out_dir / "plugin" / current);
  };

  Json report_scenarios = Json::array();
  for (const sim::Scenario& s : scenarios) {
    current = s.name;
    log(rc, err, "scenario " + s.name);
    const auto outcomes = sim::run_suite({s}, seeds, planners, policies);
    const sim::ScenarioOutcome& o = outcomes.front();
    Json successes = Json::array();
    Json steps = Json::array();
    for (std::size_t i = 0; i < o.episodes.size(); ++i) {
      const fs::path trace = out_dir / s.name / ("seed_" + std::to_string(o.seeds[i]) + ".json");
      fs::create_directories(trace.parent_path());
      json::write_file(trace, sim::to_json(o.episodes[i]));
      successes.push_back(o.episodes[i].success);
      steps.push_back(o.episodes[i].steps_used);
    }
    const sim::EpisodeConfig& c = s.config;
    report_scenarios.push_back({{"name", s.name},
                                {"seeds", o.seeds},
                                {"success", successes},
                                {"steps_used", steps},
                                {"success_rate_mean", o.stats.mean},
                                {"success_rate_std", o.stats.std},
                                {"per_seed", o.stats.per_seed},
                                {"config",
                                 {{"replan_interval", c.replan_interval},
                                  {"max_steps", c.max_steps},
                                  {"step_length", c.step_length},
                                  {"stage_loop", c.stage_loop},
                                  {"mode", c.mode == AugmentMode::kFrozen ? "frozen" : "finetuned"},
                                  {"tube_radius", c.guidance.tube_radius},
                                  {"alpha", c.guidance.alpha}}}});
    char line[160];
    std::snprintf(line, sizeof line, "%s: %.1f%% +/- %.1f over %zu seed(s)\n", s.name.c_str(), o.stats.mean,
                  o.stats.std, o.seeds.size());
    out << line;
  }
  Json report{{"planner", planner_argv.empty() ? Json("mock") : Json(planner_argv)},
              {"policy", policy_argv.empty() ? Json("mock") : Json(policy_argv)},
              {"scenarios", report_scenarios},
              {"defaults", defaults_block(rc, std::nullopt)}};
  json::write_file(out_dir / "report.json", report);
  return kExitOk;
}

// ---- dispatch -------------------------------------------------------------

struct BoundValue {
  std::string key;
  CLI::Option* option = nullptr;
  std::string value;
};

class Builder {
 public:
  CLI::Option* param(CLI::App* sub, const std::string& key, const std::string& help) {
    params_.push_back({key, nullptr, {}});
    BoundValue& b = params_.back();
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    b.option = sub->add_option(flag, b.value, help);
    owners_.push_back(sub);
    return b.option;
  }

  CLI::Option* path(CLI::App* sub, const std::string& name, const std::string& help, bool input, bool required) {
    paths_.push_back({name, nullptr, {}});
    BoundValue& b = paths_.back();
    b.option = sub->add_option("--" + name, b.value, help);
    if (required) b.option->required();
    path_owners_.push_back({sub, input});
    return b.option;
  }

  void collect(CLI::App* selected, RunConfig& rc) const {
    for (std::size_t i = 0; i < params_.size(); ++i) {
      if (owners_[i] == selected && params_[i].option->count() > 0) rc.overrides[params_[i].key] = params_[i].value;
    }
    for (std::size_t i = 0; i < paths_.size(); ++i) {
      if (path_owners_[i].first != selected || paths_[i].option->count() == 0) continue;
      (path_owners_[i].second ? rc.inputs : rc.outputs)[paths_[i].key] = paths_[i].value;
    }
  }

 private:
  std::deque<BoundValue> params_;
  std::vector<CLI::App*> owners_;
  std::deque<BoundValue> paths_;
  std::vector<std::pair<CLI::App*, bool>> path_owners_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spatio-temporal guidance toolkit: trajectory extraction, observation augmentation, "
               "dataset generation, evaluation and simulation.",
               "stguide"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");
  std::string config_path;
  int verbosity = 0;
  app.add_option("--config", config_path, "key = value parameter file (default: $" + std::string(kConfigEnv) + ")");
  app.add_flag("-v,--verbose", verbosity, "Progress messages on stderr (repeatable)");

  Builder b;

  CLI::App* extract_cmd = app.add_subcommand("extract", "2D track + depth -> canonical 3D trajectory");
  b.path(extract_cmd, "track", "Track JSON [[frame, u, v], ...]", true, true);
  b.path(extract_cmd, "depth", "Depth map (.png millimetres or .strf metres)", true, true);
  b.path(extract_cmd, "intrinsics", "Intrinsics JSON {fx, fy, cx, cy, width, height}", true, true);
  b.path(extract_cmd, "out", "Output trajectory JSON ('-' for stdout)", false, true);
  b.param(extract_cmd, "epsilon", "Outlier distance threshold in pixels (default: scaled 20 px at 256x256)");
  b.param(extract_cmd, "degree", "Polynomial smoothing degree (canonical 2)");
  b.param(extract_cmd, "k", "Output waypoint count (canonical 8)");
  bool allow_nonstandard = false;
  extract_cmd->add_flag("--allow-nonstandard", allow_nonstandard, "Permit k or degree other than the canonical values");
  std::string weights = "uniform";
  extract_cmd->add_option("--weights", weights, "Fit weights")->check(CLI::IsMember({"uniform", "endpoint"}));

  CLI::App* lift_cmd = app.add_subcommand("lift", "Canonical pixel trajectory + depth anchor -> 3D trajectory");
  b.path(lift_cmd, "pixels", "JSON [[u, v], ...] in pixels (or thousand scale with --thousand)", true, true);
  b.path(lift_cmd, "depth", "Depth map used to validate the anchor", true, true);
  b.path(lift_cmd, "intrinsics", "Intrinsics JSON", true, true);
  b.path(lift_cmd, "anchor", "Anchor JSON {\"d_start\": m, \"offsets\": [...]}", true, true);
  b.path(lift_cmd, "out", "Output trajectory JSON ('-' for stdout)", false, true);
  b.param(lift_cmd, "anchor_tolerance", "Maximum |d_start - observed depth| in metres");
  bool thousand = false;
  lift_cmd->add_flag("--thousand", thousand, "Pixels are [0, 1000] integer pairs");

  CLI::App* augment_cmd = app.add_subcommand("augment", "Apply guidance to an RGB-D observation");
  b.path(augment_cmd, "rgb", "RGB PNG", true, true);
  b.path(augment_cmd, "depth", "Depth map (.png or .strf)", true, true);
  b.path(augment_cmd, "guidance", "Guidance package JSON", true, true);
  b.path(augment_cmd, "intrinsics", "Intrinsics JSON", true, true);
  b.path(augment_cmd, "extrinsics", "workspace_from_camera transform JSON (default identity)", true, false);
  b.path(augment_cmd, "out-dir", "Output directory", false, true);
  std::vector<std::string> mask_specs;
  augment_cmd->add_option("--mask", mask_specs, "Instance mask as ID=PATH (repeatable)");
  b.param(augment_cmd, "mode", "finetuned (overlay + masking) or frozen (masking only)");
  b.param(augment_cmd, "tube_radius", "Tube radius in metres");
  b.param(augment_cmd, "tube_shape", "capsule or balls");
  b.param(augment_cmd, "sigma", "Weight falloff sigma in pixels (default: scaled 8 px at 256x256)");
  b.param(augment_cmd, "alpha", "Overlay opacity in (0, 1]");
  b.param(augment_cmd, "line_width", "Overlay line width in pixels");
  b.param(augment_cmd, "endpoint_radius", "Endpoint fallback radius in metres");

  CLI::App* gen_cmd = app.add_subcommand("gen-dataset", "Annotated videos -> training samples + manifest");
  b.path(gen_cmd, "root", "Directory containing data/<id>/info.json", true, true);
  b.path(gen_cmd, "split", "Seen/unseen split JSON", true, false);
  b.path(gen_cmd, "templates", "Prompt template JSON (default: bundled)", true, false);
  b.path(gen_cmd, "out", "Output directory", false, true);
  std::string kinds = "all";
  gen_cmd->add_option("--kinds", kinds, "Comma list of pointing,trajectory,spatial,depth,planning or 'all'");
  std::string format = "jsonl";
  gen_cmd->add_option("--format", format, "Shard format")->check(CLI::IsMember({"jsonl", "documents"}));
  b.param(gen_cmd, "epsilon", "Outlier distance threshold in pixels");
  b.param(gen_cmd, "consistency_px", "Maximum 3D/2D label disagreement in pixels");
  b.param(gen_cmd, "dead_zone", "Spatial relation dead zone in metres");
  b.param(gen_cmd, "anchor_tolerance", "Maximum |d_start - observed depth| in metres");

  CLI::App* eval_cmd = app.add_subcommand("eval", "Score predictions against ground truth");
  b.path(eval_cmd, "pred", "Predictions (JSON lines)", true, true);
  b.path(eval_cmd, "gt", "Ground truth (JSON lines)", true, true);
  b.path(eval_cmd, "mask-root", "Directory for relative mask paths", true, false);
  b.path(eval_cmd, "out", "Report JSON (default stdout)", false, false);
  std::string task;
  eval_cmd->add_option("--task", task, "pointing|pointing_box|pointing_mask|trajectory|depth|planning|text")
      ->required();
  b.param(eval_cmd, "threshold", "Pointing success threshold in pixels (required for pointing)");
  b.param(eval_cmd, "scorer", "Text scorer name");
  bool resample = false;
  eval_cmd->add_flag("--resample", resample, "Resample trajectories to 8 points before scoring");
  bool table = false;
  eval_cmd->add_flag("--table", table, "Also print an aligned text table");

  CLI::App* sim_cmd = app.add_subcommand("simulate", "Run planner/policy episodes on scenario files");
  std::vector<std::string> scenario_files;
  sim_cmd->add_option("--scenario", scenario_files, "Scenario JSON (repeatable)")->required();
  b.path(sim_cmd, "out-dir", "Output directory for traces and report.json", false, true);
  std::string seeds;
  sim_cmd->add_option("--seeds", seeds, "Seed list, e.g. 0,1,2 or 0-9 (default: --seed)");
  b.param(sim_cmd, "seed", "Single seed when --seeds is absent");
  b.param(sim_cmd, "replan_interval", "Planner interval H in steps");
  b.param(sim_cmd, "max_steps", "Episode step budget");
  b.param(sim_cmd, "step_length", "Policy step length in metres");
  b.param(sim_cmd, "mode", "finetuned or frozen");
  b.param(sim_cmd, "tube_radius", "Tube radius in metres");
  b.param(sim_cmd, "sigma", "Weight falloff sigma in pixels");
  b.param(sim_cmd, "alpha", "Overlay opacity");
  std::string stage_loop;
  sim_cmd->add_option("--stage-loop", stage_loop, "Override the scenario's stage loop")
      ->check(CLI::IsMember({"on", "off"}));
  std::string planner_exec;
  sim_cmd->add_option("--planner-exec", planner_exec, "External planner command (line-delimited JSON on stdio)");
  std::string policy_exec;
  sim_cmd->add_option("--policy-exec", policy_exec, "External policy command (line-delimited JSON on stdio)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << usage_error_line(e.what()) << "\n";
    return kExitInput;
  }

  CLI::App* selected = app.get_subcommands().front();
  try {
    RunConfig rc;
    rc.subcommand = selected->get_name();
    rc.verbosity = verbosity;
    b.collect(selected, rc);
    if (!config_path.empty()) {
      rc.config_path = config_path;
    } else if (const char* env = std::getenv(kConfigEnv); env && *env) {
      rc.config_path = env;
    }
    if (rc.config_path) rc.config = ConfigFile::load(*rc.config_path);
    if (rc.verbosity == 0) rc.verbosity = rc.config.integer("verbosity").value_or(0);

    std::vector<std::pair<std::string, fs::path>> masks;
    for (const std::string& spec : mask_specs) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos || eq == 0) throw Error(ErrorCode::kConfig, "--mask: expected ID=PATH, got '" + spec + "'");
      masks.emplace_back(spec.substr(0, eq), spec.substr(eq + 1));
      rc.inputs["mask " + spec.substr(0, eq)] = spec.substr(eq + 1);
    }
    std::vector<fs::path> scenario_paths;
    for (std::size_t i = 0; i < scenario_files.size(); ++i) {
      scenario_paths.emplace_back(scenario_files[i]);
      rc.inputs["scenario " + std::to_string(i)] = scenario_files[i];
    }
    rc.validate_inputs();
    for (const auto& [key, value] : rc.overrides) rc.word(key);

    if (rc.subcommand == "extract") return cmd_extract(rc, allow_nonstandard, weights, out);
    if (rc.subcommand == "lift") return cmd_lift(rc, thousand, out);
    if (rc.subcommand == "augment") return cmd_augment(rc, masks, out);
    if (rc.subcommand == "gen-dataset") return cmd_gen_dataset(rc, kinds, format, out, err);
    if (rc.subcommand == "eval") return cmd_eval(rc, task, resample, table, out);
    return cmd_simulate(rc, scenario_paths, seeds, stage_loop, planner_exec, policy_exec, out, err);
  } catch (const Error& e) {
    err << error_line(e) << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << error_line(Error(ErrorCode::kIo, e.what())) << "\n";
    return kExitInput;
  } catch (const nlohmann::json::exception& e) {
    err << error_line(Error(ErrorCode::kSchemaViolation, e.what())) << "\n";
    return kExitInput;
  }
}

}  // namespace stguide::cli
