#include <cmath>
#include <string>
#include <utility>

#include "points.hpp"

namespace stguide {

Trajectory3D lift_2d(const Trajectory2D& pixels, const DepthMap& depth, const CameraIntrinsics& k,
                     const DepthAnchor& anchor, const LiftOptions& options) {
  const std::size_t n = pixels.waypoints.size();
  if (n != static_cast<std::size_t>(kCanonicalLength)) {
    throw Error(ErrorCode::kInvalidArgument, "lifting expects a canonical " +
                                                 std::to_string(kCanonicalLength) +
                                                 "-waypoint trajectory, got " + std::to_string(n));
  }
  if (anchor.offsets.size() != n - 1) {
    throw Error(ErrorCode::kInvalidAnchor, "expected " + std::to_string(n - 1) + " depth offsets, got " +
                                               std::to_string(anchor.offsets.size()));
  }
  if (!valid_depth(anchor.d_start)) {
    throw Error(ErrorCode::kInvalidAnchor, "d_start must be finite and > 0");
  }
  for (double offset : anchor.offsets) {
    if (!std::isfinite(offset) || !(anchor.d_start + offset > 0.0)) {
      throw Error(ErrorCode::kInvalidAnchor, "anchored depth must stay positive");
    }
  }
  if (!depth.same_size(k.width(), k.height())) {
    throw Error(ErrorCode::kDimensionMismatch, "depth map size differs from intrinsics");
  }
  const auto observed = sample_depth(depth, pixels.waypoints.front(), options.lookup);
  if (!observed) {
    throw Error(ErrorCode::kInvalidAnchor, "first waypoint has no valid depth");
  }
  if (std::abs(*observed - anchor.d_start) > options.anchor_tolerance) {
    throw Error(ErrorCode::kInvalidAnchor,
                "d_start " + std::to_string(anchor.d_start) + " disagrees with observed depth " +
                    std::to_string(*observed));
  }

  Trajectory3D out;
  out.frame = Frame::kCamera;
  out.waypoints.reserve(n);
  out.waypoints.push_back(unproject(pixels.waypoints[0], anchor.d_start, k));
  for (std::size_t i = 1; i < n; ++i) {
    out.waypoints.push_back(unproject(pixels.waypoints[i], anchor.d_start + anchor.offsets[i - 1], k));
  }
  return out;
}

double default_epsilon(int width, int height) {
  return 20.0 * std::hypot(width, height) / std::hypot(256.0, 256.0);
}

namespace {

template <typename Fn>
auto run_stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), std::string(name) + ": " + e.what(), name);
  }
}

// Shared front half: gap filling and outlier rejection.
Track2D filter_track(const Track2D& track, double epsilon, StageTrace& trace) {
  Track2D filled = run_stage("fill_gaps", [&] { return fill_gaps(track); });
  trace.stages.push_back({"fill_gaps", track.entries.size(), filled.entries.size(), {}});

  OutlierResult filtered = run_stage("reject_outliers", [&] { return reject_outliers(filled, epsilon); });
  trace.degenerate_motion = filtered.degenerate_motion;
  trace.stages.push_back({"reject_outliers", filled.entries.size(), filtered.track.entries.size(),
                          filtered.degenerate_motion ? "degenerate motion vector" : ""});
  return std::move(filtered.track);
}

int effective_degree(std::size_t points, StageTrace& trace) {
  int degree = trace.degree_requested;
  if (points < static_cast<std::size_t>(degree) + 1) {
    degree = static_cast<int>(points) - 1;
    trace.degree_degraded = true;
  }
  trace.degree_used = degree;
  return degree;
}

std::string smoothing_note(const StageTrace& trace) {
  std::string note = "degree=" + std::to_string(trace.degree_used);
  if (trace.degree_degraded) note += " (degraded)";
  return note;
}

}  // namespace

ExtractResult extract(const Track2D& track, const DepthMap& depth, const CameraIntrinsics& k,
                      const ExtractOptions& options) {
  ExtractResult result;
  StageTrace& trace = result.trace;
  trace.epsilon = options.epsilon.value_or(default_epsilon(k.width(), k.height()));
  trace.degree_requested = options.degree;
  trace.k = options.k;

  const Track2D filtered = filter_track(track, trace.epsilon, trace);

  FuseResult fused = run_stage("fuse_depth", [&] { return fuse_depth(filtered, depth, k, options.lookup); });
  trace.stages.push_back({"fuse_depth", filtered.entries.size(), fused.trajectory.waypoints.size(),
                          std::to_string(fused.dropped_frames.size()) + " dropped"});

  const int degree = effective_degree(fused.trajectory.waypoints.size(), trace);
  const std::vector<double> weights = make_weights(fused.trajectory.waypoints.size(), options.weights);
  Trajectory3D smoothed = run_stage("smooth_polyfit", [&] {
    return smooth_polyfit(fused.trajectory, degree, weights);
  });
  trace.stages.push_back({"smooth_polyfit", fused.trajectory.waypoints.size(),
                          smoothed.waypoints.size(), smoothing_note(trace)});

  result.trajectory = run_stage("resample_uniform", [&] { return resample_uniform(smoothed, options.k); });
  trace.stages.push_back({"resample_uniform", smoothed.waypoints.size(),
                          result.trajectory.waypoints.size(), "k=" + std::to_string(options.k)});
  return result;
}

Extract2DResult extract_2d(const Track2D& track, int width, int height, const ExtractOptions& options) {
  Extract2DResult result;
  StageTrace& trace = result.trace;
  trace.epsilon = options.epsilon.value_or(default_epsilon(width, height));
  trace.degree_requested = options.degree;
  trace.k = options.k;

  const Track2D filtered = filter_track(track, trace.epsilon, trace);
  Trajectory2D pixels;
  for (const TrackEntry& e : filtered.entries) pixels.waypoints.push_back(e.point);

  const int degree = effective_degree(pixels.waypoints.size(), trace);
  const std::vector<double> weights = make_weights(pixels.waypoints.size(), options.weights);
  Trajectory2D smoothed = run_stage("smooth_polyfit", [&] { return smooth_polyfit(pixels, degree, weights); });
  trace.stages.push_back({"smooth_polyfit", pixels.waypoints.size(), smoothed.waypoints.size(),
                          smoothing_note(trace)});

  result.trajectory = run_stage("resample_uniform", [&] { return resample_uniform(smoothed, options.k); });
  trace.stages.push_back({"resample_uniform", smoothed.waypoints.size(),
                          result.trajectory.waypoints.size(), "k=" + std::to_string(options.k)});
  return result;
}

}  // namespace stguide
