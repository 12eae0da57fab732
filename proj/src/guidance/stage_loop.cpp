#include <string>

#include "masking.hpp"

namespace stguide {

StageLoopSummary stage_masking_loop(std::span<const StageSpec> stages, const SceneProvider& scenes,
                                    const CompletionPredicate& completed, const EmissionSink& sink,
                                    const StageLoopOptions& options) {
  if (stages.empty()) throw Error(ErrorCode::kInvalidArgument, "stage loop needs at least one stage");
  if (!scenes || !completed) throw Error(ErrorCode::kInvalidArgument, "scene provider and predicate required");
  if (options.step_budget < 1) throw Error(ErrorCode::kInvalidArgument, "step budget must be >= 1");

  StageLoopSummary summary;
  const GuidanceParams& params = options.params;
  for (std::size_t s = 0; s < stages.size(); ++s) {
    const SpatialTube tube = build_tube(stages[s].reference, params.tube_radius, params.tube_shape);
    const int stage = static_cast<int>(s);
    int steps = 0;
    while (true) {
      if (steps >= options.step_budget) {
        throw Error(ErrorCode::kStageStalled, "stage " + std::to_string(stage) + " ('" +
                                                  stages[s].instruction + "') did not complete within " +
                                                  std::to_string(options.step_budget) + " steps");
      }
      const StageScene scene = scenes(stage, summary.total_steps);
      const Observation& obs = scene.observation;
      if (obs.rgb.channels() != 3 || !obs.rgb.same_size(scene.k.width(), scene.k.height()) ||
          !obs.depth.same_size(obs.rgb)) {
        throw Error(ErrorCode::kDimensionMismatch, "stage scene does not match its intrinsics");
      }
      const detail::SceneObjects objects = detail::scene_objects(obs, scene.k, scene.workspace_from_camera);
      const std::set<std::string> focus = detail::tube_relevant(objects, tube);

      StageEmission emission;
      emission.stage = stage;
      emission.step = summary.total_steps;
      emission.focus_ids.assign(focus.begin(), focus.end());
      for (const std::string& id : objects.ids) {
        if (!focus.count(id)) emission.masked_ids.push_back(id);
      }
      const double sigma = params.sigma.value_or(default_sigma(scene.k.width(), scene.k.height()));
      WeightMapResult weights = detail::relevance_weights(obs, focus, sigma);
      InpaintResult filled = inpaint(obs.rgb, obs.depth, weights.weights, params.inpaint);
      emission.observation.rgb = std::move(filled.rgb);
      emission.observation.depth = std::move(filled.depth);
      emission.observation.weights = std::move(weights.weights);
      emission.observation.no_relevant_mask = weights.no_relevant_mask;
      emission.observation.relevant_ids = emission.focus_ids;

      ++steps;
      ++summary.total_steps;
      if (sink) sink(emission);
      if (completed(stage, emission.step, emission)) break;
    }
    summary.steps_per_stage.push_back(steps);
  }
  return summary;
}

}  // namespace stguide
