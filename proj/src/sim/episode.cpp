#include "stguide/sim.hpp"

namespace stguide::sim {

namespace {

void apply_action(WorldState& world, const Keypose& action) {
  const Gripper before = world.effector.gripper;
  world.effector = action;
  const Eigen::Vector3d eff = action.pose.translation();
  if (world.held) {
    SimObject& o = world.objects.at(*world.held);
    o.pose = RigidTransform(o.pose.rotation(), eff + world.held_offset);
  }
  if (before == Gripper::kOpen && action.gripper == Gripper::kClosed && !world.held) {
    double best = kGraspTolerance;
    for (const auto& [id, o] : world.objects) {
      const double d = (o.grasp_point() - eff).norm();
      if (d <= best && (!world.held || d < best)) {
        best = d;
        world.held = id;
      }
    }
    if (world.held) world.held_offset = world.objects.at(*world.held).pose.translation() - eff;
  } else if (before == Gripper::kClosed && action.gripper == Gripper::kOpen) {
    world.held.reset();
  }
}

void apply_disturbances(WorldState& world, const EpisodeConfig& config, int step) {
  for (const Disturbance& d : config.disturbances) {
    if (d.step != step) continue;
    SimObject& o = world.objects.at(d.object);
    o.pose = RigidTransform(o.pose.rotation(), o.pose.translation() + d.translation);
    if (world.held == d.object) world.held.reset();
  }
}

bool stage_done(const WorldState& world, const StageGoal& goal) {
  return in_goal(world, goal.object, goal.goal) && world.effector.gripper == Gripper::kOpen &&
         world.held != goal.object;
}

}  // namespace

EpisodeResult run_episode(const Scenario& scenario, Planner& planner, Policy& policy, std::uint64_t seed,
                          const StepObserver& observer) {
  const EpisodeConfig& config = scenario.config;
  config.validate();
  WorldState world = initial_world(scenario, seed);
  policy.reset();

  const int stages = static_cast<int>(config.stages.size());
  EpisodeResult result;
  result.stage_completed.assign(stages, false);
  result.stage_completion_step.assign(stages, -1);
  int stage = 0;
  bool advanced = false;
  std::optional<GuidancePackage> guidance;

  for (int step = 0; step < config.max_steps; ++step) {
    world.step = step;
    const Observation obs = render_observation(world, scenario.camera);

    StepRecord record;
    record.step = step;
    record.stage = stage;
    std::string reason;
    if (step % config.replan_interval == 0) {
      reason = "schedule";
    } else if (advanced && config.stage_loop) {
      reason = "stage_advance";
    }
    advanced = false;
    if (!reason.empty()) {
      const std::string instruction = config.stage_loop ? config.stages[stage].instruction : config.full_instruction();
      guidance = planner.plan({obs, instruction, step, world, scenario.camera});
      guidance->issue_step = step;
      policy.on_guidance(*guidance, world);
      record.issue = IssueMarker{reason, guidance->sub_instruction, guidance->trajectory.waypoints.size(),
                                 guidance->degenerate};
    }

    const AugmentedObservation aug =
        augment(obs, *guidance, config.mode, scenario.camera.k, scenario.camera.workspace_from_camera, config.guidance);
    if (observer) observer(step, obs, aug);
    record.action = policy.act({aug, world, guidance->sub_instruction, &*guidance, step});
    record.relevant_ids = aug.relevant_ids;

    apply_action(world, record.action);
    apply_disturbances(world, config, step);
    while (stage < stages && stage_done(world, config.stages[stage])) {
      result.stage_completed[stage] = true;
      result.stage_completion_step[stage] = step;
      ++stage;
      advanced = true;
    }

    record.effector = world.effector.pose.translation();
    record.held = world.held;
    for (const auto& [id, o] : world.objects) record.object_positions[id] = o.pose.translation();
    result.trace.push_back(std::move(record));
    result.steps_used = step + 1;
    if (stage == stages) {
      result.success = true;
      break;
    }
  }
  return result;
}

std::vector<ScenarioOutcome> run_suite(const std::vector<Scenario>& scenarios, const std::vector<std::uint64_t>& seeds,
                                       const PlannerFactory& planners, const PolicyFactory& policies) {
  if (scenarios.empty()) throw Error(ErrorCode::kInvalidArgument, "no scenarios");
  if (seeds.empty()) throw Error(ErrorCode::kInvalidArgument, "no seeds");
  if (!planners || !policies) throw Error(ErrorCode::kInvalidArgument, "missing planner or policy factory");
  std::vector<ScenarioOutcome> out;
  for (const Scenario& scenario : scenarios) {
    ScenarioOutcome outcome{scenario.name, seeds, {}, {}};
    std::vector<std::vector<bool>> groups;
    for (std::uint64_t seed : seeds) {
      auto planner = planners();
      auto policy = policies(scenario);
      outcome.episodes.push_back(run_episode(scenario, *planner, *policy, seed));
      groups.push_back({outcome.episodes.back().success});
    }
    outcome.stats = success_stats(groups);
    out.push_back(std::move(outcome));
  }
  return out;
}

}  // namespace stguide::sim
