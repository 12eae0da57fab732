#include <algorithm>
#include <cctype>

#include "stguide/sim.hpp"

namespace stguide::sim {

namespace {

std::vector<std::string> words(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || ch == '_' || ch == '-') {
      current.push_back(ch);
    } else if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

}  // namespace

GuidancePackage MockPlanner::plan(const PlannerRequest& request) {
  std::optional<std::string> target;
  std::optional<std::string> goal;
  for (const std::string& w : words(request.instruction)) {
    if (!target && request.world.objects.count(w)) target = w;
    if (!goal && request.world.goals.count(w)) goal = w;
  }
  if (!target) throw Error(ErrorCode::kUnknownEntity, "instruction names no known object: '" + request.instruction + "'");
  if (!goal) throw Error(ErrorCode::kUnknownEntity, "instruction names no known goal: '" + request.instruction + "'");

  const SimObject& object = request.world.object(*target);
  const Eigen::Vector3d start = object.pose.apply(Eigen::Vector3d(0.0, 0.0, object.extent.z()));
  const Eigen::Vector3d end = request.world.goal(*goal).center + Eigen::Vector3d(0.0, 0.0, object.extent.z());

  GuidancePackage g;
  g.trajectory.frame = Frame::kWorkspace;
  if ((end - start).norm() < 1e-9) {
    g.trajectory.waypoints = {Point3::from(start, Frame::kWorkspace), Point3::from(start, Frame::kWorkspace)};
    g.degenerate = true;
  } else {
    Trajectory3D line{{Point3::from(start, Frame::kWorkspace), Point3::from(end, Frame::kWorkspace)},
                      Frame::kWorkspace};
    g.trajectory = resample_uniform(line, kCanonicalLength);
  }
  g.relevant_ids = {*target, *goal};
  std::sort(g.relevant_ids.begin(), g.relevant_ids.end());
  g.sub_instruction = request.instruction;
  g.issue_step = request.step;
  return g;
}

MockPolicy::MockPolicy(double step_length) : step_length_(step_length) {
  if (!(step_length > 0.0)) throw Error(ErrorCode::kInvalidArgument, "step length must be positive");
}

void MockPolicy::reset() {
  guidance_.reset();
  next_ = 0;
}

void MockPolicy::on_guidance(const GuidancePackage& guidance, const WorldState& state) {
  guidance_ = guidance;
  next_ = state.held ? 1 : 0;
}

Keypose MockPolicy::act(const PolicyRequest& request) {
  if (!guidance_) throw Error(ErrorCode::kNoGuidance, "policy has not received guidance");
  const auto& wps = guidance_->trajectory.waypoints;
  Keypose out = request.state.effector;
  Eigen::Vector3d pos = out.pose.translation();
  if (next_ >= wps.size()) return out;

  out.gripper = next_ == 0 ? Gripper::kOpen : Gripper::kClosed;
  double budget = step_length_;
  while (next_ < wps.size()) {
    const Eigen::Vector3d target = wps[next_].vec();
    const double dist = (target - pos).norm();
    if (dist > budget) {
      pos += (target - pos) * (budget / dist);
      break;
    }
    pos = target;
    budget -= dist;
    if (next_ == 0) {
      out.gripper = Gripper::kClosed;
      next_ = 1;
      break;
    }
    if (next_ + 1 == wps.size()) {
      out.gripper = Gripper::kOpen;
      next_ = wps.size();
      break;
    }
    ++next_;
  }
  out.pose = RigidTransform(out.pose.rotation(), pos);
  return out;
}

}  // namespace stguide::sim
