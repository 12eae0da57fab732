#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stguide/geometry.hpp"

namespace stguide {

inline constexpr int kCanonicalLength = 8;
inline constexpr int kSmoothingDegree = 2;

struct TrackEntry {
  int frame = 0;
  Pixel point;
  friend bool operator==(const TrackEntry&, const TrackEntry&) = default;
};

// 2D keypoint track from an external tracker. Frame indices strictly
// increase; gaps (missing frames) are allowed.
struct Track2D {
  std::vector<TrackEntry> entries;
  friend bool operator==(const Track2D&, const Track2D&) = default;
};

struct Trajectory3D {
  std::vector<Point3> waypoints;
  Frame frame = Frame::kCamera;
};

struct Trajectory2D {
  std::vector<Pixel> waypoints;
};

// Anchored depth: waypoint 0 sits at d_start, waypoint i > 0 at
// d_start + offsets[i - 1].
struct DepthAnchor {
  double d_start = 0.0;
  std::vector<double> offsets;
};

// Throws TooFewPoints (< 2 entries) or InvalidArgument (non-increasing
// frames, non-finite pixels).
void validate_track(const Track2D& track);

// One entry per frame in [first, last]; missing frames are linearly
// interpolated between the bracketing observations.
Track2D fill_gaps(const Track2D& track);

struct OutlierResult {
  Track2D track;
  std::vector<int> removed_frames;
  // First and last entries coincide; the track is returned unchanged.
  bool degenerate_motion = false;
};

// Drops entries whose perpendicular distance to the line through the first
// and last entries exceeds epsilon. Endpoints are always kept.
OutlierResult reject_outliers(const Track2D& track, double epsilon);

struct FuseResult {
  Trajectory3D trajectory;
  std::vector<int> dropped_frames;
};

// Per-entry sub-pixel depth lookup and unprojection; entries without usable
// depth are dropped. Throws AllDepthInvalid when nothing survives and
// TooFewPoints when a single waypoint survives.
FuseResult fuse_depth(const Track2D& track, const DepthMap& depth, const CameraIntrinsics& k,
                      const DepthLookupOptions& lookup = {});

// Normalized chordal arc length in [0, 1]; all zeros for a zero-length path.
std::vector<double> chordal_parameters(std::span<const Eigen::VectorXd> points);

// Weighted least-squares polynomial coefficients, ascending powers.
// Throws RankDeficient when fewer than degree + 1 distinct parameters exist.
std::vector<double> fit_polynomial(std::span<const double> params, std::span<const double> values,
                                   std::span<const double> weights, int degree);

enum class WeightProfile { kUniform, kEndpointEmphasis };

std::vector<double> make_weights(std::size_t count, WeightProfile profile);

// Replaces each coordinate with its weighted polynomial fit over the chordal
// parameter, evaluated at the original parameters. Empty weights = uniform.
Trajectory3D smooth_polyfit(const Trajectory3D& trajectory, int degree = kSmoothingDegree,
                            std::span<const double> weights = {});
Trajectory2D smooth_polyfit(const Trajectory2D& trajectory, int degree = kSmoothingDegree,
                            std::span<const double> weights = {});

// k points equally spaced in arc length along the polyline. Endpoints are
// copied exactly. Throws ZeroLength for a zero-length polyline.
Trajectory3D resample_uniform(const Trajectory3D& trajectory, int k = kCanonicalLength);
Trajectory2D resample_uniform(const Trajectory2D& trajectory, int k = kCanonicalLength);

struct LiftOptions {
  // Maximum |d_start - observed depth at the first pixel| in meters.
  double anchor_tolerance = 0.05;
  DepthLookupOptions lookup;
};

// Lifts a canonical pixel trajectory using the anchor; surface depth is only
// consulted to validate d_start. Throws InvalidAnchor.
Trajectory3D lift_2d(const Trajectory2D& pixels, const DepthMap& depth, const CameraIntrinsics& k,
                     const DepthAnchor& anchor, const LiftOptions& options = {});

// 20 px at 256x256, scaled with the image diagonal.
double default_epsilon(int width, int height);

struct ExtractOptions {
  std::optional<double> epsilon;  // default_epsilon() when unset
  int degree = kSmoothingDegree;
  int k = kCanonicalLength;
  WeightProfile weights = WeightProfile::kUniform;
  DepthLookupOptions lookup;
};

struct StageRecord {
  std::string name;
  std::size_t input_count = 0;
  std::size_t output_count = 0;
  std::string note;
};

struct StageTrace {
  std::vector<StageRecord> stages;
  double epsilon = 0.0;
  int degree_requested = kSmoothingDegree;
  int degree_used = kSmoothingDegree;
  // Fewer than degree + 1 points survived filtering; fit degree lowered.
  bool degree_degraded = false;
  bool degenerate_motion = false;
  int k = kCanonicalLength;
};

struct ExtractResult {
  Trajectory3D trajectory;
  StageTrace trace;
};

struct Extract2DResult {
  Trajectory2D trajectory;
  StageTrace trace;
};

// fill_gaps -> reject_outliers -> fuse_depth -> smooth_polyfit ->
// resample_uniform. Stage errors are rethrown with Error::stage() set.
ExtractResult extract(const Track2D& track, const DepthMap& depth, const CameraIntrinsics& k,
                      const ExtractOptions& options = {});

// Image-plane variant (no depth fusion) used for 2D trajectory samples.
Extract2DResult extract_2d(const Track2D& track, int width, int height,
                           const ExtractOptions& options = {});

}  // namespace stguide
