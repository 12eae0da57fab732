#include <cmath>
#include <string>

#include "stguide/trajectory.hpp"

namespace stguide {

void validate_track(const Track2D& track) {
  if (track.entries.size() < 2) {
    throw Error(ErrorCode::kTooFewPoints, "track needs at least 2 entries, has " +
                                              std::to_string(track.entries.size()));
  }
  for (std::size_t i = 0; i < track.entries.size(); ++i) {
    const auto& e = track.entries[i];
    if (!std::isfinite(e.point.u) || !std::isfinite(e.point.v)) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite pixel at frame " + std::to_string(e.frame));
    }
    if (i > 0 && e.frame <= track.entries[i - 1].frame) {
      throw Error(ErrorCode::kInvalidArgument, "track frame indices must strictly increase");
    }
  }
}

Track2D fill_gaps(const Track2D& track) {
  validate_track(track);
  Track2D out;
  const auto& in = track.entries;
  out.entries.reserve(static_cast<std::size_t>(in.back().frame - in.front().frame + 1));
  for (std::size_t i = 0; i + 1 < in.size(); ++i) {
    const TrackEntry& a = in[i];
    const TrackEntry& b = in[i + 1];
    out.entries.push_back(a);
    const double span = b.frame - a.frame;
    for (int f = a.frame + 1; f < b.frame; ++f) {
      const double t = (f - a.frame) / span;
      out.entries.push_back({f, {a.point.u + t * (b.point.u - a.point.u),
                                 a.point.v + t * (b.point.v - a.point.v)}});
    }
  }
  out.entries.push_back(in.back());
  return out;
}

OutlierResult reject_outliers(const Track2D& track, double epsilon) {
  validate_track(track);
  if (!(epsilon > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "outlier threshold must be positive");
  }
  OutlierResult result;
  const Pixel a = track.entries.front().point;
  const Pixel b = track.entries.back().point;
  const double vx = b.u - a.u;
  const double vy = b.v - a.v;
  const double length = std::hypot(vx, vy);
  if (length == 0.0) {
    result.track = track;
    result.degenerate_motion = true;
    return result;
  }
  const std::size_t last = track.entries.size() - 1;
  for (std::size_t i = 0; i <= last; ++i) {
    const TrackEntry& e = track.entries[i];
    if (i == 0 || i == last) {
      result.track.entries.push_back(e);
      continue;
    }
    const double cross = vx * (e.point.v - a.v) - vy * (e.point.u - a.u);
    if (std::abs(cross) / length > epsilon) {
      result.removed_frames.push_back(e.frame);
    } else {
      result.track.entries.push_back(e);
    }
  }
  return result;
}

FuseResult fuse_depth(const Track2D& track, const DepthMap& depth, const CameraIntrinsics& k,
                      const DepthLookupOptions& lookup) {
  if (!depth.same_size(k.width(), k.height())) {
    throw Error(ErrorCode::kDimensionMismatch, "depth map size differs from intrinsics");
  }
  FuseResult result;
  for (const TrackEntry& e : track.entries) {
    if (!(e.point.u >= 0.0 && e.point.u <= k.width() && e.point.v >= 0.0 &&
          e.point.v <= k.height())) {
      throw Error(ErrorCode::kOutOfBounds, "track pixel outside the depth map at frame " +
                                               std::to_string(e.frame));
    }
    const auto z = sample_depth(depth, e.point, lookup);
    if (!z) {
      result.dropped_frames.push_back(e.frame);
      continue;
    }
    result.trajectory.waypoints.push_back(unproject(e.point, *z, k));
  }
  if (result.trajectory.waypoints.empty()) {
    throw Error(ErrorCode::kAllDepthInvalid, "no track entry has valid depth");
  }
  if (result.trajectory.waypoints.size() < 2) {
    throw Error(ErrorCode::kTooFewPoints, "only one track entry has valid depth");
  }
  result.trajectory.frame = Frame::kCamera;
  return result;
}

}  // namespace stguide
