#include <algorithm>
#include <cmath>
#include <cstdio>

#include "stguide/dataset.hpp"

namespace stguide {

namespace {

using Pairs = std::vector<std::array<int, 2>>;

SampleRecord make_sample(TaskKind kind, std::string user, std::string assistant, std::string image,
                         const AnnotationRecord& record, const GenerationOptions& options) {
  SampleRecord s;
  s.messages.push_back({"user", std::move(user)});
  s.messages.push_back({"assistant", std::move(assistant)});
  s.images.push_back(std::move(image));
  s.meta = SampleMeta{kind, record.task_description,
                      options.variation.empty() ? record.task_description : options.variation, options.video};
  return s;
}

std::string pair_text(const std::array<int, 2>& p) {
  return "[" + std::to_string(p[0]) + ", " + std::to_string(p[1]) + "]";
}

std::string pairs_text(Pairs::const_iterator first, Pairs::const_iterator last) {
  std::string out = "[";
  for (auto it = first; it != last; ++it) {
    if (it != first) out += ", ";
    out += pair_text(*it);
  }
  return out + "]";
}

std::string pairs_text(const Pairs& pairs) { return pairs_text(pairs.begin(), pairs.end()); }

Pixel clamp_to_image(const Pixel& p, int width, int height) {
  return {std::clamp(p.u, 0.0, static_cast<double>(width)), std::clamp(p.v, 0.0, static_cast<double>(height))};
}

Pairs to_thousand(const std::vector<Pixel>& pixels, int width, int height) {
  Pairs out;
  out.reserve(pixels.size());
  for (const Pixel& p : pixels) out.push_back(normalize_thousand(clamp_to_image(p, width, height), width, height));
  return out;
}

double round_to(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(value * scale) / scale;
}

std::string action_ref(std::size_t index) { return "action_descriptions[" + std::to_string(index) + "]"; }

}  // namespace

void GenerationReport::append(GenerationReport&& other) {
  samples.insert(samples.end(), std::make_move_iterator(other.samples.begin()),
                 std::make_move_iterator(other.samples.end()));
  skipped.insert(skipped.end(), std::make_move_iterator(other.skipped.begin()),
                 std::make_move_iterator(other.skipped.end()));
}

std::string frame_image_path(const GenerationOptions& options, int frame) {
  char name[32];
  std::snprintf(name, sizeof name, "frame_%03d", frame);
  return "data/" + options.video + "/rgb/" + name + options.image_extension;
}

GenerationReport gen_pointing(const AnnotationRecord& record, const CameraIntrinsics& k,
                              const PromptTemplates& templates, const GenerationOptions& options) {
  GenerationReport report;
  for (std::size_t a = 0; a < record.actions.size(); ++a) {
    const ActionRecord& action = record.actions[a];
    for (const auto* arm : {&action.left, &action.right}) {
      if (!*arm) continue;
      const std::string side = arm == &action.left ? ".left_description." : ".right_description.";
      for (const CoordinateEntry& entry : (*arm)->coordinates) {
        const std::string ref = action_ref(a) + side + entry.key;
        if (!entry.image_coordinates) continue;
        const Pixel uv{static_cast<double>((*entry.image_coordinates)[0]),
                       static_cast<double>((*entry.image_coordinates)[1])};
        if (uv.u < 0 || uv.v < 0 || uv.u > k.width() || uv.v > k.height()) {
          report.skipped.push_back({TaskKind::kPointing2D, ref, "image_coordinates outside the image"});
          continue;
        }
        if (entry.cartesian_coordinates) {
          const auto& c = *entry.cartesian_coordinates;
          const Eigen::Vector3d cam = options.camera_from_annotation.apply(Eigen::Vector3d(c[0], c[1], c[2]));
          if (!(cam.z() > 0.0)) {
            report.skipped.push_back({TaskKind::kPointing2D, ref, "3D label behind the camera"});
            continue;
          }
          const Pixel projected = project(Point3::from(cam, Frame::kCamera), k);
          const double gap = std::hypot(projected.u - uv.u, projected.v - uv.v);
          if (gap > options.consistency_px) {
            report.skipped.push_back({TaskKind::kPointing2D, ref,
                                      "inconsistent: 3D label reprojects " + json::format_fixed(gap, 2) +
                                          " px from image_coordinates"});
            continue;
          }
        }
        const std::string object = entry.text.empty() ? (*arm)->action_description : entry.text;
        report.samples.push_back(make_sample(TaskKind::kPointing2D, templates.render("pointing", {{"object", object}}),
                                             pair_text(normalize_thousand(uv, k.width(), k.height())),
                                             frame_image_path(options, action.start_frame), record, options));
      }
    }
  }
  return report;
}

GenerationReport gen_trajectory(const AnnotationRecord& record, const std::vector<std::optional<Track2D>>& tracks,
                                int width, int height, const PromptTemplates& templates,
                                const GenerationOptions& options) {
  if (tracks.size() != record.actions.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "one track slot per action required");
  }
  GenerationReport report;
  for (std::size_t a = 0; a < record.actions.size(); ++a) {
    if (!tracks[a]) continue;
    const Extract2DResult result = extract_2d(*tracks[a], width, height, options.extract);
    const Pairs pairs = to_thousand(result.trajectory.waypoints, width, height);
    SampleRecord s = make_sample(TaskKind::kTrajectory2D,
                                 templates.render("trajectory", {{"task", record.actions[a].description()}}),
                                 pairs_text(pairs), frame_image_path(options, record.actions[a].start_frame),
                                 record, options);
    s.traj_2d = pairs;
    report.samples.push_back(std::move(s));
  }
  return report;
}

GenerationReport gen_depth(const AnnotationRecord& record, const std::vector<std::optional<Track2D>>& tracks,
                           const std::vector<std::optional<DepthMap>>& depths, const CameraIntrinsics& k,
                           const PromptTemplates& templates, const GenerationOptions& options) {
  if (tracks.size() != record.actions.size() || depths.size() != record.actions.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "one track and depth slot per action required");
  }
  GenerationReport report;
  for (std::size_t a = 0; a < record.actions.size(); ++a) {
    if (!tracks[a] || !depths[a]) continue;
    const std::string ref = action_ref(a);
    const ExtractResult fused = extract(*tracks[a], *depths[a], k, options.extract);
    const auto& wps = fused.trajectory.waypoints;

    Trajectory2D pixels;
    for (const Point3& p : wps) pixels.waypoints.push_back(project(p, k));
    DepthAnchor anchor;
    anchor.d_start = round_to(wps.front().z, options.depth_decimals);
    for (std::size_t i = 1; i < wps.size(); ++i) {
      anchor.offsets.push_back(round_to(wps[i].z - anchor.d_start, options.depth_decimals));
    }
    Trajectory3D lifted;
    try {
      lifted = lift_2d(pixels, *depths[a], k, anchor, options.lift);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kInvalidAnchor) throw;
      report.skipped.push_back({TaskKind::kDepth3D, ref, std::string("invalid anchor: ") + e.what()});
      continue;
    }
    bool consistent = true;
    for (std::size_t i = 0; i < wps.size(); ++i) {
      if (std::abs(lifted.waypoints[i].z - wps[i].z) > 1e-3 + 1e-12) consistent = false;
    }
    if (!consistent) {
      report.skipped.push_back({TaskKind::kDepth3D, ref, "anchored depths deviate from fused depths by > 1 mm"});
      continue;
    }

    std::string answer = "{\"d_start\": " + json::format_fixed(anchor.d_start, options.depth_decimals) +
                         ", \"offsets\": [";
    for (std::size_t i = 0; i < anchor.offsets.size(); ++i) {
      if (i) answer += ", ";
      answer += json::format_fixed(anchor.offsets[i], options.depth_decimals);
    }
    answer += "]}";
    const auto start = normalize_thousand(clamp_to_image(pixels.waypoints.front(), k.width(), k.height()), k);
    report.samples.push_back(make_sample(
        TaskKind::kDepth3D,
        templates.render("depth", {{"task", record.actions[a].description()}, {"start", pair_text(start)}}),
        std::move(answer), frame_image_path(options, record.actions[a].start_frame), record, options));
  }
  return report;
}

std::string_view relation_name(SpatialRelation r) {
  switch (r) {
    case SpatialRelation::kLeftOf: return "left of";
    case SpatialRelation::kRightOf: return "right of";
    case SpatialRelation::kInFrontOf: return "in front of";
    case SpatialRelation::kBehind: return "behind";
    case SpatialRelation::kAbove: return "above";
    case SpatialRelation::kBelow: return "below";
    case SpatialRelation::kNearer: return "nearer";
    case SpatialRelation::kFarther: return "farther";
  }
  return "unknown";
}

std::vector<RelationFact> spatial_relations(const std::string& a, const Eigen::Vector3d& pa, const std::string& b,
                                            const Eigen::Vector3d& pb, double dead_zone) {
  std::vector<RelationFact> out;
  auto axis = [&](double da, double db, SpatialRelation less, SpatialRelation more) {
    const double delta = da - db;
    if (delta < -dead_zone) out.push_back({a, b, less});
    if (delta > dead_zone) out.push_back({a, b, more});
  };
  axis(pa.x(), pb.x(), SpatialRelation::kLeftOf, SpatialRelation::kRightOf);
  axis(pa.z(), pb.z(), SpatialRelation::kInFrontOf, SpatialRelation::kBehind);
  axis(pa.y(), pb.y(), SpatialRelation::kAbove, SpatialRelation::kBelow);
  axis(pa.norm(), pb.norm(), SpatialRelation::kNearer, SpatialRelation::kFarther);
  return out;
}

GenerationReport gen_spatial(const AnnotationRecord& record, const PromptTemplates& templates,
                             const GenerationOptions& options) {
  struct Entity {
    std::string label;
    Eigen::Vector3d position;
  };
  std::vector<Entity> entities;
  for (const ActionRecord& action : record.actions) {
    for (const auto* arm : {&action.left, &action.right}) {
      if (!*arm) continue;
      for (const CoordinateEntry& entry : (*arm)->coordinates) {
        if (!entry.cartesian_coordinates) continue;
        const std::string label = entry.text.empty() ? entry.key : entry.text;
        const bool seen = std::any_of(entities.begin(), entities.end(),
                                      [&](const Entity& e) { return e.label == label; });
        if (seen) continue;
        const auto& c = *entry.cartesian_coordinates;
        entities.push_back({label, options.camera_from_annotation.apply(Eigen::Vector3d(c[0], c[1], c[2]))});
      }
    }
  }
  GenerationReport report;
  if (entities.size() < 2) {
    report.skipped.push_back({TaskKind::kSpatial3D, "record", "fewer than 2 labeled entities"});
    return report;
  }
  const std::string image = frame_image_path(options, record.actions.front().start_frame);
  for (std::size_t i = 0; i < entities.size(); ++i) {
    for (std::size_t j = i + 1; j < entities.size(); ++j) {
      for (const RelationFact& f : spatial_relations(entities[i].label, entities[i].position, entities[j].label,
                                                     entities[j].position, options.dead_zone)) {
        const int group = static_cast<int>(f.relation) / 2;
        const auto first = static_cast<SpatialRelation>(group * 2);
        const auto second = static_cast<SpatialRelation>(group * 2 + 1);
        const std::string choices = std::string(relation_name(first)) + " / " + std::string(relation_name(second));
        report.samples.push_back(make_sample(
            TaskKind::kSpatial3D, templates.render("spatial", {{"a", f.a}, {"b", f.b}, {"options", choices}}),
            std::string(relation_name(f.relation)), image, record, options));
      }
    }
  }
  return report;
}

GenerationReport gen_planning(const AnnotationRecord& record,
                              const std::vector<std::optional<std::vector<std::array<int, 2>>>>& traj_2d,
                              const PromptTemplates& templates, const GenerationOptions& options) {
  if (!traj_2d.empty() && traj_2d.size() != record.actions.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "one trajectory slot per action required");
  }
  GenerationReport report;
  const std::size_t n = record.actions.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::string current = record.actions[i].description();
    const std::string image = frame_image_path(options, record.actions[i].start_frame);
    const std::map<std::string, std::string> vars{{"task", record.task_description}, {"current", current}};
    const std::string next = i + 1 < n ? record.actions[i + 1].description() : options.none_sentinel;
    const std::string previous = i > 0 ? record.actions[i - 1].description() : options.none_sentinel;
    report.samples.push_back(
        make_sample(TaskKind::kPlanning4D, templates.render("planning_next", vars), next, image, record, options));
    report.samples.push_back(make_sample(TaskKind::kPlanning4D, templates.render("planning_previous", vars),
                                         previous, image, record, options));
    const std::string progress = "{\"step\": " + std::to_string(i + 1) + ", \"total\": " + std::to_string(n) +
                                 ", \"finished\": " + (i + 1 == n ? "true" : "false") + "}";
    report.samples.push_back(make_sample(TaskKind::kPlanning4D, templates.render("planning_progress", vars),
                                         progress, image, record, options));

    if (traj_2d.empty() || !traj_2d[i]) continue;
    const Pairs& full = *traj_2d[i];
    if (full.size() != static_cast<std::size_t>(kCanonicalLength)) {
      report.skipped.push_back({TaskKind::kPlanning4D, action_ref(i), "trajectory is not canonical length"});
      continue;
    }
    for (int j = 2; j <= 6; ++j) {
      const std::map<std::string, std::string> rvars{
          {"task", current},
          {"observed", std::to_string(j)},
          {"prefix", pairs_text(full.begin(), full.begin() + j)},
          {"remaining", std::to_string(kCanonicalLength - j)}};
      report.samples.push_back(make_sample(TaskKind::kPlanning4D, templates.render("planning_remaining", rvars),
                                           pairs_text(full.begin() + j, full.end()), image, record, options));
    }
  }
  return report;
}

}  // namespace stguide
