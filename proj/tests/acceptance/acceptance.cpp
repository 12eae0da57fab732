#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "harness.hpp"
#include "oracles.hpp"
#include "stguide/dataset.hpp"
#include "stguide/guidance.hpp"
#include "stguide/image_io.hpp"
#include "stguide/metrics.hpp"
#include "stguide/sim.hpp"
#include "stguide/trajectory.hpp"

using namespace stguide;
namespace fs = std::filesystem;

namespace {

constexpr double kRoundtripTolPx = 1e-6;
constexpr double kRoundtripBudgetS = 1.0;
constexpr double kPolyfitParityTol = 1e-6;
constexpr double kSpacingRelTol = 1e-6;
constexpr double kOnPolylineRelTol = 1e-9;
constexpr double kLiftXyRelTol = 1e-12;
constexpr double kMetricTol = 1e-12;
constexpr double kSimSuiteBudgetS = 60.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  Outcome done(const std::string& summary) const {
    if (failed_ == 0) return {true, summary};
    std::string d = std::to_string(failed_) + " failure(s): ";
    for (std::size_t i = 0; i < failures_.size(); ++i) d += (i ? "; " : "") + failures_[i];
    return {false, d};
  }

 private:
  std::size_t failed_ = 0;
  std::vector<std::string> failures_;
};

std::string fmt(double v, int digits = 3) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RigidTransform random_transform(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> t(-1.0, 1.0);
  return RigidTransform(Eigen::Quaterniond(n(rng), n(rng), n(rng), n(rng)), Eigen::Vector3d(t(rng), t(rng), t(rng)));
}

struct Fixture {
  Observation observation;
  CameraIntrinsics k{1, 1, 0, 0, 1, 1};
  RigidTransform workspace_from_camera;
  GuidancePackage guidance;
  std::string name;
};

Fixture augment_fixture() {
  const fs::path d = harness::fixtures() / "augment";
  Fixture f;
  f.name = "augment fixture";
  f.observation.rgb = io::read_rgb_png(d / "rgb.png");
  f.observation.depth = io::read_float_raster(d / "depth.strf");
  for (const char* id : {"book", "cup", "plate"}) {
    f.observation.masks.push_back({id, io::read_mask_png(d / (std::string("mask_") + id + ".png"))});
  }
  f.k = json::intrinsics_from_json(json::read_file(d / "intrinsics.json"));
  f.workspace_from_camera = json::transform_from_json(json::read_file(d / "extrinsics.json"));
  f.guidance = json::guidance_from_json(json::read_file(d / "guidance.json"));
  return f;
}

std::vector<Fixture> scenario_fixtures() {
  std::vector<Fixture> out;
  for (const char* name : {"pick_place", "displaced_target", "three_stage_chain"}) {
    const sim::Scenario s = sim::read_scenario(harness::scenarios() / (std::string(name) + ".json"));
    const sim::WorldState world = sim::initial_world(s, 0);
    Fixture f;
    f.name = name;
    f.observation = sim::render_observation(world, s.camera);
    f.k = s.camera.k;
    f.workspace_from_camera = s.camera.workspace_from_camera;
    sim::MockPlanner planner;
    const std::string instruction = s.config.stages.front().instruction;
    f.guidance = planner.plan({f.observation, instruction, 0, world, s.camera});
    f.guidance.relevant_ids.clear();
    out.push_back(std::move(f));
  }
  return out;
}

// ---------------------------------------------------------------------------

Outcome geometry_roundtrip() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> uu(0.0, 640.0), vv(0.0, 480.0), zz(0.05, 20.0);
  const CameraIntrinsics k(525.0, 520.0, 319.5, 239.5, 640, 480);
  std::vector<RigidTransform> transforms;
  for (int i = 0; i < 64; ++i) transforms.push_back(random_transform(rng));
  double worst = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 10000; ++i) {
    const Pixel p{uu(rng), vv(rng)};
    const double z = zz(rng);
    const Point3 c = unproject(p, z, k);
    Pixel q;
    if (i % 2 == 0) {
      q = project(c, k);
    } else {
      const RigidTransform& wfc = transforms[i % transforms.size()];
      q = project(wfc.apply(c, Frame::kWorkspace), k, wfc.inverse());
    }
    worst = std::max(worst, std::hypot(q.u - p.u, q.v - p.v));
  }
  const double elapsed = seconds_since(t0);
  Checker c;
  c.expect(worst < kRoundtripTolPx, "max error " + fmt(worst) + " px");
  c.expect(elapsed < kRoundtripBudgetS, "took " + fmt(elapsed) + " s");
  return c.done("10000 pairs, max error " + fmt(worst) + " px in " + fmt(elapsed) + " s");
}

Outcome canonical_constants() {
  Checker c;
  c.expect(kCanonicalLength == 8, "kCanonicalLength != 8");
  c.expect(kSmoothingDegree == 2, "kSmoothingDegree != 2");
  c.expect(ExtractOptions{}.k == 8 && ExtractOptions{}.degree == 2, "ExtractOptions defaults");

  auto check_trace = [&](const StageTrace& t, std::size_t n, const std::string& where) {
    c.expect(n == 8, where + ": length " + std::to_string(n));
    c.expect(t.k == 8 && t.degree_requested == 2 && t.degree_used == 2 && !t.degree_degraded,
             where + ": trace constants");
    bool fit = false, resample = false;
    for (const StageRecord& s : t.stages) {
      if (s.name == "smooth_polyfit") fit = s.note == "degree=2";
      if (s.name == "resample_uniform") resample = s.output_count == 8 && s.note == "k=8";
    }
    c.expect(fit && resample, where + ": stage records");
  };

  const fs::path d = harness::fixtures() / "extract";
  const DepthMap depth = io::read_float_raster(d / "depth.strf");
  const CameraIntrinsics k = json::intrinsics_from_json(json::read_file(d / "intrinsics.json"));
  const Track2D track = json::track_from_json(json::read_file(d / "track.json"));
  const ExtractResult r = extract(track, depth, k);
  check_trace(r.trace, r.trajectory.waypoints.size(), "fixture");

  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> a(-3.0, 3.0);
  int cases = 1;
  for (int i = 0; i < 200; ++i) {
    Track2D t;
    const int n = 5 + static_cast<int>(rng() % 30);
    const double u0 = 5 + a(rng), v0 = 40 + a(rng), du = 1.5 + a(rng) / 3, dv = -0.5 + a(rng) / 6;
    for (int f = 0; f < n; ++f) t.entries.push_back({f, {u0 + du * f, v0 + dv * f + 0.01 * f * f}});
    const Extract2DResult e = extract_2d(t, 64, 48);
    check_trace(e.trace, e.trajectory.waypoints.size(), "random 2d #" + std::to_string(i));
    ++cases;
  }

  harness::TempDir tmp("acc-extract");
  const harness::ToolRun run = harness::run_tool(
      {"extract", "--track", (d / "track.json").string(), "--depth", (d / "depth.strf").string(), "--intrinsics",
       (d / "intrinsics.json").string(), "--out", (tmp / "out.json").string()},
      tmp.path());
  c.expect(run.exit_code == 0, "cli exit " + std::to_string(run.exit_code));
  if (run.exit_code == 0) {
    const json::Json j = json::read_file(tmp / "out.json");
    const json::Json& t = j["trace"];
    c.expect(j["trajectory"].size() == 8, "cli trajectory length");
    c.expect(t["k"] == 8 && t["degree_used"] == 2 && t["degree_requested"] == 2, "cli trace constants");
    ++cases;
  }
  return c.done(std::to_string(cases) + " traces report k=8, degree=2");
}

Outcome outlier_rejection() {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> px(0.0, 500.0), eps(0.5, 40.0), unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  Checker c;
  std::size_t removed_total = 0;
  for (int t = 0; t < 1000; ++t) {
    const int n = 2 + static_cast<int>(rng() % 40);
    const double epsilon = eps(rng);
    const double scatter = std::pow(10.0, -1.0 + 3.0 * unit(rng));
    const oracle::P2 a{px(rng), px(rng)};
    oracle::P2 b{px(rng), px(rng)};
    if (t % 50 == 0) b = a;
    Track2D track;
    std::vector<oracle::P2> pts;
    int frame = static_cast<int>(rng() % 5);
    for (int i = 0; i < n; ++i) {
      const double s = n == 1 ? 0.0 : double(i) / (n - 1);
      oracle::P2 p{a.u + (b.u - a.u) * s + scatter * noise(rng), a.v + (b.v - a.v) * s + scatter * noise(rng)};
      if (i == 0) p = a;
      if (i == n - 1) p = b;
      pts.push_back(p);
      track.entries.push_back({frame, {p.u, p.v}});
      frame += 1 + static_cast<int>(rng() % 3);
    }
    const OutlierResult r = reject_outliers(track, epsilon);
    const std::vector<std::size_t> keep = oracle::outlier_keep(pts, epsilon);
    std::vector<int> expected_frames, got_frames;
    for (std::size_t i : keep) expected_frames.push_back(track.entries[i].frame);
    for (const TrackEntry& e : r.track.entries) got_frames.push_back(e.frame);
    c.expect(got_frames == expected_frames, "track " + std::to_string(t) + " kept-set differs");
    c.expect(got_frames.size() + r.removed_frames.size() == track.entries.size(),
             "track " + std::to_string(t) + " lost entries");
    for (const TrackEntry& e : r.track.entries) {
      const auto& src = *std::find_if(track.entries.begin(), track.entries.end(),
                                      [&](const TrackEntry& x) { return x.frame == e.frame; });
      c.expect(src == e, "track " + std::to_string(t) + " altered an entry");
    }
    removed_total += r.removed_frames.size();
  }
  return c.done("1000 tracks, 0 disagreements, " + std::to_string(removed_total) + " entries rejected");
}

Outcome polyfit_optimality() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> unit(0.0, 1.0), coef(-5.0, 5.0), wt(0.1, 3.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  Checker c;
  double worst_parity = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    const int n = 4 + static_cast<int>(rng() % 60);
    std::vector<double> s(n), y(n), w(n);
    for (int i = 0; i < n; ++i) s[i] = unit(rng);
    s[0] = 0.0;
    s[n - 1] = 1.0;
    std::sort(s.begin(), s.end());
    const double c0 = coef(rng), c1 = coef(rng), c2 = coef(rng), sd = 0.01 + unit(rng);
    for (int i = 0; i < n; ++i) {
      y[i] = c0 + c1 * s[i] + c2 * s[i] * s[i] + sd * noise(rng);
      w[i] = inst % 3 == 0 ? 1.0 : wt(rng);
    }
    const std::vector<double> fit = fit_polynomial(s, y, w, 2);
    const std::vector<double> ref = oracle::normal_equation_fit(s, y, w, 2);
    for (int j = 0; j < 3; ++j) worst_parity = std::max(worst_parity, std::abs(fit[j] - ref[j]));
    const double best = oracle::weighted_sse(fit, s, y, w);
    for (int p = 0; p < 100; ++p) {
      const double scale = std::pow(10.0, -4.0 + 4.0 * unit(rng));
      std::vector<double> q = fit;
      for (double& v : q) v += scale * noise(rng);
      const double sse = oracle::weighted_sse(q, s, y, w);
      c.expect(best <= sse, "instance " + std::to_string(inst) + " beaten by a perturbation");
    }
  }
  c.expect(worst_parity <= kPolyfitParityTol, "normal-equation parity " + fmt(worst_parity));
  return c.done("100 instances x 100 perturbations, oracle parity " + fmt(worst_parity));
}

template <std::size_t D>
bool locate_on_polyline(const std::vector<std::array<double, D>>& poly, const std::vector<double>& cum,
                        const std::array<double, D>& q, double expected, double& position) {
  const double total = cum.back();
  double best_gap = std::numeric_limits<double>::infinity();
  bool found = false;
  for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
    long double len2 = 0, dot = 0, off2 = 0;
    for (std::size_t c = 0; c < D; ++c) {
      const long double d = poly[i + 1][c] - poly[i][c];
      len2 += d * d;
      dot += d * (q[c] - poly[i][c]);
    }
    const long double t = len2 > 0 ? std::clamp(dot / len2, 0.0L, 1.0L) : 0.0L;
    for (std::size_t c = 0; c < D; ++c) {
      const long double r = q[c] - (poly[i][c] + t * (poly[i + 1][c] - poly[i][c]));
      off2 += r * r;
    }
    if (std::sqrt(static_cast<double>(off2)) > kOnPolylineRelTol * total) continue;
    const double pos = cum[i] + static_cast<double>(t * std::sqrt(len2));
    if (std::abs(pos - expected) < best_gap) {
      best_gap = std::abs(pos - expected);
      position = pos;
      found = true;
    }
  }
  return found;
}

Outcome resampling() {
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  Checker c;
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const int n = 2 + static_cast<int>(rng() % 20);
    const int k = t % 4 == 0 ? 2 + static_cast<int>(rng() % 30) : kCanonicalLength;
    const std::string tag = "polyline " + std::to_string(t);
    if (t % 2 == 0) {
      Trajectory3D in;
      std::vector<std::array<double, 3>> poly;
      for (int i = 0; i < n; ++i) {
        std::array<double, 3> p{coord(rng), coord(rng), coord(rng)};
        if (i > 0 && rng() % 10 == 0) p = poly.back();
        poly.push_back(p);
        in.waypoints.push_back({p[0], p[1], p[2], Frame::kCamera});
      }
      const std::vector<double> cum = oracle::cumulative_length(poly);
      if (cum.back() == 0.0) continue;
      const Trajectory3D out = resample_uniform(in, k);
      c.expect(static_cast<int>(out.waypoints.size()) == k, tag + " size");
      c.expect(out.waypoints.front() == in.waypoints.front() && out.waypoints.back() == in.waypoints.back(),
               tag + " endpoints not bit-exact");
      for (int i = 0; i < k; ++i) {
        const double expected = cum.back() * i / (k - 1);
        double pos = 0.0;
        const auto& w = out.waypoints[i];
        const bool on = locate_on_polyline<3>(poly, cum, {w.x, w.y, w.z}, expected, pos);
        c.expect(on, tag + " point off the polyline");
        if (on) worst = std::max(worst, std::abs(pos - expected) / cum.back());
      }
    } else {
      Trajectory2D in;
      std::vector<std::array<double, 2>> poly;
      for (int i = 0; i < n; ++i) {
        std::array<double, 2> p{100 * coord(rng), 100 * coord(rng)};
        if (i > 0 && rng() % 10 == 0) p = poly.back();
        poly.push_back(p);
        in.waypoints.push_back({p[0], p[1]});
      }
      const std::vector<double> cum = oracle::cumulative_length(poly);
      if (cum.back() == 0.0) continue;
      const Trajectory2D out = resample_uniform(in, k);
      c.expect(static_cast<int>(out.waypoints.size()) == k, tag + " size");
      c.expect(out.waypoints.front() == in.waypoints.front() && out.waypoints.back() == in.waypoints.back(),
               tag + " endpoints not bit-exact");
      for (int i = 0; i < k; ++i) {
        const double expected = cum.back() * i / (k - 1);
        double pos = 0.0;
        const bool on = locate_on_polyline<2>(poly, cum, {out.waypoints[i].u, out.waypoints[i].v}, expected, pos);
        c.expect(on, tag + " point off the polyline");
        if (on) worst = std::max(worst, std::abs(pos - expected) / cum.back());
      }
    }
  }
  c.expect(worst <= kSpacingRelTol, "spacing deviation " + fmt(worst));
  return c.done("1000 polylines, endpoints exact, worst relative spacing error " + fmt(worst));
}

Outcome lift_anchor() {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Checker c;
  for (int t = 0; t < 1000; ++t) {
    const int w = 32 + static_cast<int>(rng() % 64), h = 24 + static_cast<int>(rng() % 48);
    const double f = 30.0 + 100.0 * unit(rng);
    const CameraIntrinsics k(f, f * (0.9 + 0.2 * unit(rng)), (w - 1) / 2.0, (h - 1) / 2.0, w, h);
    const double base = 0.3 + 2.0 * unit(rng), tilt = 0.01 * unit(rng);
    DepthMap depth(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) depth.at(x, y) = static_cast<float>(base + tilt * y);
    }
    Trajectory2D pixels;
    for (int i = 0; i < kCanonicalLength; ++i) pixels.waypoints.push_back({unit(rng) * (w - 1), unit(rng) * (h - 1)});
    const Pixel& p0 = pixels.waypoints.front();
    DepthAnchor anchor;
    anchor.d_start = base + tilt * p0.v + 0.04 * (unit(rng) - 0.5);
    for (int i = 1; i < kCanonicalLength; ++i) anchor.offsets.push_back(0.3 * (unit(rng) - 0.5));
    const Trajectory3D out = lift_2d(pixels, depth, k, anchor);
    const std::string tag = "case " + std::to_string(t);
    c.expect(out.waypoints.size() == pixels.waypoints.size(), tag + " size");
    for (std::size_t i = 0; i < out.waypoints.size(); ++i) {
      const double z = i == 0 ? anchor.d_start : anchor.d_start + anchor.offsets[i - 1];
      c.expect(out.waypoints[i].z == z, tag + " waypoint " + std::to_string(i) + " depth not exact");
      const oracle::P3 o = oracle::unproject(pixels.waypoints[i].u, pixels.waypoints[i].v, z, k.fx(), k.fy(), k.cx(), k.cy());
      const double scale = std::max(1.0, std::abs(z));
      c.expect(std::abs(out.waypoints[i].x - o.x) <= kLiftXyRelTol * scale &&
                   std::abs(out.waypoints[i].y - o.y) <= kLiftXyRelTol * scale,
               tag + " waypoint " + std::to_string(i) + " xy");
    }
  }
  return c.done("1000 cases, anchored depths exact");
}

Outcome tube_relevance() {
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  Checker c;
  int relevant = 0, irrelevant = 0;
  for (int scene = 0; scene < 100; ++scene) {
    Trajectory3D traj;
    traj.frame = Frame::kWorkspace;
    std::vector<oracle::P3> poly;
    oracle::P3 p{unit(rng), unit(rng), unit(rng)};
    for (int i = 0; i < kCanonicalLength; ++i) {
      poly.push_back(p);
      traj.waypoints.push_back({p.x, p.y, p.z, Frame::kWorkspace});
      p = {p.x + 0.1 * noise(rng), p.y + 0.1 * noise(rng), p.z + 0.1 * noise(rng)};
    }
    const double radius = 0.02 + 0.1 * unit(rng);
    const SpatialTube tube = build_tube(traj, radius);
    for (int q = 0; q < 100; ++q) {
      const oracle::P3 anchor = poly[rng() % poly.size()];
      const double spread = 0.25 * unit(rng);
      const oracle::P3 centre{anchor.x + spread * noise(rng), anchor.y + spread * noise(rng),
                              anchor.z + spread * noise(rng)};
      ObjectOccupancy object;
      object.id = "obj" + std::to_string(q);
      std::vector<oracle::P3> pts;
      const int n = 1 + static_cast<int>(rng() % 20);
      for (int i = 0; i < n; ++i) {
        const oracle::P3 x{centre.x + 0.02 * noise(rng), centre.y + 0.02 * noise(rng), centre.z + 0.02 * noise(rng)};
        pts.push_back(x);
        object.points.points.push_back({x.x, x.y, x.z, Frame::kWorkspace});
      }
      const bool expected = oracle::min_distance_to_polyline(pts, poly) <= radius;
      const bool got = relevance(object, tube);
      c.expect(got == expected, "scene " + std::to_string(scene) + " object " + std::to_string(q));
      (expected ? relevant : irrelevant)++;
    }
  }
  c.expect(relevant > 1000 && irrelevant > 1000, "unbalanced scenes");

  c.expect(kEndpointRadius == 0.10 && GuidanceParams{}.endpoint_radius == 0.10, "endpoint radius constant");
  const Point3 terminal{0.4, -0.2, 0.3, Frame::kWorkspace};
  auto at = [&](const std::string& id, double d) {
    ObjectOccupancy o;
    o.id = id;
    o.points.points.push_back({terminal.x + d, terminal.y, terminal.z, Frame::kWorkspace});
    return o;
  };
  const std::vector<ObjectOccupancy> inside{at("far", 0.1005), at("near", 0.0995)};
  const std::vector<ObjectOccupancy> outside{at("far", 0.1005), at("farther", 0.2)};
  const std::vector<ObjectOccupancy> tie{at("b", 0.05), at("a", -0.05)};
  c.expect(endpoint_fallback(inside, terminal) == std::optional<std::string>("near"), "0.0995 m not selected");
  c.expect(!endpoint_fallback(outside, terminal).has_value(), "0.1005 m selected");
  c.expect(endpoint_fallback(tie, terminal) == std::optional<std::string>("a"), "tie not broken by id");
  return c.done("100 scenes x 100 objects agree with the oracle (" + std::to_string(relevant) + " relevant); " +
                "fallback radius 0.10 m");
}

std::vector<std::vector<std::size_t>> hole_components(const std::vector<std::uint8_t>& hole, int w, int h) {
  std::vector<int> label(hole.size(), -1);
  std::vector<std::vector<std::size_t>> comps;
  for (std::size_t s = 0; s < hole.size(); ++s) {
    if (!hole[s] || label[s] >= 0) continue;
    comps.emplace_back();
    std::vector<std::size_t> stack{s};
    label[s] = static_cast<int>(comps.size() - 1);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      comps.back().push_back(i);
      const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
      const int nx[4] = {x - 1, x + 1, x, x}, ny[4] = {y, y, y - 1, y + 1};
      for (int d = 0; d < 4; ++d) {
        if (nx[d] < 0 || ny[d] < 0 || nx[d] >= w || ny[d] >= h) continue;
        const std::size_t j = static_cast<std::size_t>(ny[d]) * w + nx[d];
        if (hole[j] && label[j] < 0) {
          label[j] = label[s];
          stack.push_back(j);
        }
      }
    }
  }
  return comps;
}

Outcome inpaint_maximum_principle() {
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Checker c;
  std::size_t filled = 0;
  for (int t = 0; t < 100; ++t) {
    const int w = 24 + static_cast<int>(rng() % 40), h = 20 + static_cast<int>(rng() % 30);
    RgbImage rgb = make_rgb(w, h);
    DepthMap depth(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        depth.at(x, y) = static_cast<float>(0.5 + 0.02 * x + 0.01 * y + 0.3 * unit(rng));
        for (int ch = 0; ch < 3; ++ch) rgb.at(x, y, ch) = static_cast<std::uint8_t>(rng() % 256);
      }
    }
    const bool soft = t % 4 == 3;
    WeightMap weights(w, h, 1, 1.0f);
    std::vector<std::uint8_t> hole(static_cast<std::size_t>(w) * h, 0);
    const int blobs = 1 + static_cast<int>(rng() % 3);
    for (int b = 0; b < blobs; ++b) {
      const double cx = unit(rng) * w, cy = unit(rng) * h, r = 2.0 + unit(rng) * std::min(w, h) / 4.0;
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          if (std::hypot(x - cx, y - cy) > r) continue;
          weights.at(x, y) = soft ? static_cast<float>(0.45 * unit(rng)) : 0.0f;
          hole[static_cast<std::size_t>(y) * w + x] = 1;
        }
      }
    }
    if (std::all_of(hole.begin(), hole.end(), [](auto v) { return v != 0; })) continue;
    const InpaintResult r = inpaint(rgb, depth, weights);
    const std::string tag = "hole " + std::to_string(t);
    for (const auto& comp : hole_components(hole, w, h)) {
      double lo[4], hi[4];
      std::fill(lo, lo + 4, std::numeric_limits<double>::infinity());
      std::fill(hi, hi + 4, -std::numeric_limits<double>::infinity());
      for (std::size_t i : comp) {
        const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
        const int nx[4] = {x - 1, x + 1, x, x}, ny[4] = {y, y, y - 1, y + 1};
        for (int d = 0; d < 4; ++d) {
          if (nx[d] < 0 || ny[d] < 0 || nx[d] >= w || ny[d] >= h) continue;
          if (hole[static_cast<std::size_t>(ny[d]) * w + nx[d]]) continue;
          const double vals[4] = {depth.at(nx[d], ny[d]), double(rgb.at(nx[d], ny[d], 0)),
                                  double(rgb.at(nx[d], ny[d], 1)), double(rgb.at(nx[d], ny[d], 2))};
          for (int ch = 0; ch < 4; ++ch) {
            lo[ch] = std::min(lo[ch], vals[ch]);
            hi[ch] = std::max(hi[ch], vals[ch]);
          }
        }
      }
      for (std::size_t i : comp) {
        const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
        const double out[4] = {r.depth.at(x, y), double(r.rgb.at(x, y, 0)), double(r.rgb.at(x, y, 1)),
                               double(r.rgb.at(x, y, 2))};
        const double orig[4] = {depth.at(x, y), double(rgb.at(x, y, 0)), double(rgb.at(x, y, 1)),
                                double(rgb.at(x, y, 2))};
        for (int ch = 0; ch < 4; ++ch) {
          const double a = soft ? std::min(lo[ch], orig[ch]) : lo[ch];
          const double b = soft ? std::max(hi[ch], orig[ch]) : hi[ch];
          c.expect(out[ch] >= a && out[ch] <= b, tag + " channel " + std::to_string(ch) + " outside boundary range");
        }
        ++filled;
      }
    }
    for (std::size_t i = 0; i < hole.size(); ++i) {
      if (hole[i]) continue;
      const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
      c.expect(r.depth.at(x, y) == depth.at(x, y) && r.rgb.at(x, y, 0) == rgb.at(x, y, 0) &&
                   r.rgb.at(x, y, 1) == rgb.at(x, y, 1) && r.rgb.at(x, y, 2) == rgb.at(x, y, 2),
               tag + " kept pixel changed");
    }
  }

  std::vector<Fixture> scenes = scenario_fixtures();
  scenes.push_back(augment_fixture());
  GuidanceParams wide;
  wide.tube_radius = 10.0;
  for (const Fixture& f : scenes) {
    const AugmentedObservation a =
        augment(f.observation, f.guidance, AugmentMode::kFrozen, f.k, f.workspace_from_camera, wide);
    c.expect(a.relevant_ids.size() == f.observation.masks.size(), f.name + ": not every instance relevant");
    c.expect(a.rgb == f.observation.rgb && a.depth == f.observation.depth, f.name + ": RGB-D changed");
  }
  return c.done("100 holes (" + std::to_string(filled) + " pixels) within boundary range; " +
                std::to_string(scenes.size()) + " all-relevant scenes bit-identical");
}

Outcome frozen_contract() {
  Checker c;
  std::vector<Fixture> scenes = scenario_fixtures();
  scenes.insert(scenes.begin(), augment_fixture());
  std::size_t masked = 0;
  for (const Fixture& f : scenes) {
    const GuidanceParams params;
    const AugmentedObservation frozen =
        augment(f.observation, f.guidance, AugmentMode::kFrozen, f.k, f.workspace_from_camera, params);
    const AugmentedObservation tuned =
        augment(f.observation, f.guidance, AugmentMode::kFinetuned, f.k, f.workspace_from_camera, params);
    const InpaintResult only = inpaint(f.observation.rgb, f.observation.depth, frozen.weights, params.inpaint);
    c.expect(frozen.rgb == only.rgb, f.name + ": frozen RGB differs from inpainting alone");
    c.expect(frozen.depth == only.depth, f.name + ": frozen depth differs from inpainting alone");
    c.expect(frozen.weights == tuned.weights && frozen.depth == tuned.depth, f.name + ": modes disagree on masking");
    c.expect(frozen.rgb != tuned.rgb, f.name + ": finetuned overlay missing");
    masked += only.hole_pixels;
  }

  const fs::path d = harness::fixtures() / "augment";
  const fs::path golden = harness::fixtures() / "golden" / "augment_frozen";
  const Fixture f = augment_fixture();
  const InpaintResult only =
      inpaint(f.observation.rgb, f.observation.depth, io::read_float_raster(golden / "weights.strf"));
  c.expect(io::read_rgb_png(golden / "rgb.png") == only.rgb, "pinned frozen RGB differs from inpainting alone");
  c.expect(io::read_float_raster(golden / "depth.strf") == only.depth, "pinned frozen depth differs");
  harness::TempDir tmp("acc-frozen");
  const harness::ToolRun run = harness::run_tool(
      {"augment", "--rgb", (d / "rgb.png").string(), "--depth", (d / "depth.strf").string(), "--guidance",
       (d / "guidance.json").string(), "--intrinsics", (d / "intrinsics.json").string(), "--extrinsics",
       (d / "extrinsics.json").string(), "--mask", "book=" + (d / "mask_book.png").string(), "--mask",
       "cup=" + (d / "mask_cup.png").string(), "--mask", "plate=" + (d / "mask_plate.png").string(), "--mode",
       "frozen", "--out-dir", tmp.path().string()},
      tmp.path());
  c.expect(run.exit_code == 0, "cli augment exit " + std::to_string(run.exit_code));
  if (run.exit_code == 0) {
    c.expect(io::read_rgb_png(tmp / "rgb.png") == only.rgb && io::read_float_raster(tmp / "depth.strf") == only.depth,
             "cli frozen output differs from inpainting alone");
  }
  return c.done(std::to_string(scenes.size()) + " fixtures plus the CLI path, " + std::to_string(masked) +
                " masked pixels, frozen == inpaint-only");
}

std::string random_text(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces{"pick", " ", "the", "<image>", "\"q\"", "\\", "\n", "\t",
                                               "é", "日本", "[500, 499]", "{x}", "0.674", "'", "/", ""};
  std::string s;
  const int n = static_cast<int>(rng() % 12);
  for (int i = 0; i < n; ++i) s += pieces[rng() % pieces.size()];
  return s;
}

SampleRecord random_sample(std::mt19937_64& rng) {
  SampleRecord s;
  const int m = 1 + static_cast<int>(rng() % 6);
  for (int i = 0; i < m; ++i) s.messages.push_back({i % 2 == 0 ? "user" : "assistant", random_text(rng)});
  const int images = static_cast<int>(rng() % 3);
  for (int i = 0; i < images; ++i) s.images.push_back("data/" + std::to_string(rng() % 100) + "/rgb/frame_001.png");
  if (rng() % 2) {
    std::vector<std::array<int, 2>> pairs;
    for (int i = 0; i < kCanonicalLength; ++i) {
      pairs.push_back({static_cast<int>(rng() % 1001), static_cast<int>(rng() % 1001)});
    }
    s.traj_2d = pairs;
  }
  if (rng() % 2) {
    s.meta = SampleMeta{kAllTaskKinds[rng() % kAllTaskKinds.size()], random_text(rng), random_text(rng),
                        std::to_string(rng() % 10000)};
  }
  return s;
}

Outcome dataset_criteria() {
  Checker c;
  const AnnotationRecord a = read_annotation(harness::fixtures() / "annotation/data/0001/info.json");
  bool found = false;
  if (!a.actions.empty() && a.actions[0].left && !a.actions[0].left->coordinates.empty()) {
    const CoordinateEntry& e = a.actions[0].left->coordinates[0];
    found = true;
    c.expect(e.image_coordinates == std::optional<std::array<int, 2>>({417, 170}), "image_coordinates");
    const std::array<double, 6> cart{-0.031, -0.115, 0.674, 0.153, 0.013, 0.633};
    c.expect(e.cartesian_coordinates == std::optional<std::array<double, 6>>(cart), "cartesian_coordinates");
  }
  c.expect(found, "annotation coordinate missing");

  const fs::path sample_path = harness::fixtures() / "sample_unified.json";
  const std::string text = harness::read_bytes(sample_path);
  const SampleRecord s = sample_from_json(json::Json::parse(text));
  c.expect(to_json(s).dump(2) + "\n" == text, "unified sample does not round-trip byte-for-byte");
  c.expect(s.traj_2d && s.traj_2d->front() == std::array<int, 2>{500, 499} &&
               s.traj_2d->back() == std::array<int, 2>{631, 459},
           "traj_2d endpoints");

  std::mt19937_64 rng(909);
  for (int i = 0; i < 1000; ++i) {
    const SampleRecord r = random_sample(rng);
    const std::string once = to_json(r).dump();
    const SampleRecord back = sample_from_json(json::Json::parse(once));
    c.expect(back == r, "random sample " + std::to_string(i) + " changed after parse(write)");
    c.expect(to_json(back).dump() == once, "random sample " + std::to_string(i) + " text changed");
  }

  const SplitSpec split = read_split(bundled_data_dir() / "splits" / "peract_onecam.json");
  const TaskSplit* jar = split.find("close_jar");
  c.expect(jar && jar->seen.size() == 15 && jar->unseen.size() == 5, "close_jar split counts");
  return c.done("annotation values exact, unified sample byte-identical, 1000 random round-trips, close_jar 15/5");
}

Outcome metrics_criteria() {
  Checker c;
  c.expect(std::abs(token_f1("pick up the coffee goblet", "pick the coffee goblet") - 8.0 / 9.0) < kMetricTol,
           "token F1");
  c.expect(token_f1("a b", "a b") == 1.0 && token_f1("a b", "c d") == 0.0, "token F1 extremes");

  const std::vector<DepthPrediction> accurate{{0.119, 0.10}}, inaccurate{{0.121, 0.10}};
  const DepthMetrics da = depth_metrics(accurate), di = depth_metrics(inaccurate);
  c.expect(da.ratio_accuracy == 1.0 && std::abs(da.mad_cm - 1.9) < 1e-9, "gt 0.10 / pred 0.119");
  c.expect(di.ratio_accuracy == 0.0 && std::abs(di.mad_cm - 2.1) < 1e-9, "gt 0.10 / pred 0.121");

  const std::vector<Pixel> at_threshold{{3, 4}}, origin{{0, 0}};
  c.expect(pointing_stats(at_threshold, origin, 5.0).sr == 0.0, "SR must be strict");
  const std::vector<BoxPrediction> corner{{{10, 20}, {10, 20, 30, 40}}};
  c.expect(hit_rate_box(corner) == 1.0, "box corner must hit");

  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> px(0.0, 100.0), dz(0.2, 3.0), unit(0.0, 1.0);
  std::vector<Pixel> pa(8), pb(8);
  for (int i = 0; i < 8; ++i) {
    pa[i] = {px(rng), px(rng)};
    pb[i] = {pa[i].u + 3.0, pa[i].v - 4.0};
  }
  const TrajectoryErrors offset = traj_errors(pa, pb);
  c.expect(std::abs(offset.rmse - 5.0) < 1e-12 && std::abs(offset.mae - 5.0) < 1e-12, "constant offset");

  int violations = 0;
  double worst = 0.0;
  for (int t = 0; t < 10000; ++t) {
    std::vector<Pixel> p(8), q(8);
    long double sum = 0, sum2 = 0;
    for (int i = 0; i < 8; ++i) {
      p[i] = {px(rng), px(rng)};
      q[i] = {px(rng), px(rng)};
      const long double e = std::hypot((long double)p[i].u - q[i].u, (long double)p[i].v - q[i].v);
      sum += e;
      sum2 += e * e;
    }
    const TrajectoryErrors e = traj_errors(p, q);
    if (e.rmse < e.mae) ++violations;
    worst = std::max({worst, std::abs(e.mae - double(sum / 8)), std::abs(e.rmse - double(std::sqrt(sum2 / 8)))});
  }
  c.expect(violations == 0, std::to_string(violations) + " RMSE < MAE cases");
  c.expect(worst < 1e-9, "trajectory error oracle parity " + fmt(worst));

  for (int t = 0; t < 200; ++t) {
    const int n = 1 + static_cast<int>(rng() % 30);
    std::vector<Pixel> pred(n), truth(n);
    std::vector<DepthPrediction> depth(n);
    std::vector<BoxPrediction> boxes(n);
    std::vector<PlanningPrediction> plans(n);
    const double threshold = 1.0 + 20 * unit(rng);
    long double med = 0, mad = 0;
    int hits = 0, accurate_n = 0, box_hits = 0, step_eq = 0, status_eq = 0, step_abs = 0;
    for (int i = 0; i < n; ++i) {
      pred[i] = {px(rng), px(rng)};
      truth[i] = {pred[i].u + 10 * (unit(rng) - 0.5), pred[i].v + 10 * (unit(rng) - 0.5)};
      const double d = std::hypot(pred[i].u - truth[i].u, pred[i].v - truth[i].v);
      med += d;
      hits += d < threshold;
      depth[i] = {dz(rng), dz(rng)};
      mad += std::abs(depth[i].predicted - depth[i].truth);
      accurate_n += std::abs(depth[i].predicted - depth[i].truth) <= 0.2 * depth[i].truth;
      const double u0 = px(rng), v0 = px(rng);
      boxes[i] = {{px(rng), px(rng)}, {u0, v0, u0 + 30, v0 + 30}};
      box_hits += boxes[i].point.u >= u0 && boxes[i].point.u <= u0 + 30 && boxes[i].point.v >= v0 &&
                  boxes[i].point.v <= v0 + 30;
      plans[i].predicted_step = 1 + static_cast<int>(rng() % 5);
      plans[i].true_step = 1 + static_cast<int>(rng() % 5);
      plans[i].predicted_finished = rng() % 2;
      plans[i].true_finished = rng() % 2;
      step_eq += plans[i].predicted_step == plans[i].true_step;
      step_abs += std::abs(plans[i].predicted_step - plans[i].true_step);
      status_eq += plans[i].predicted_finished == plans[i].true_finished;
    }
    const PointingStats ps = pointing_stats(pred, truth, threshold);
    const DepthMetrics dm = depth_metrics(depth);
    const PlanningMetrics pm = planning_metrics(plans);
    const std::string tag = "random set " + std::to_string(t);
    c.expect(std::abs(ps.med - double(med / n)) < 1e-9 && ps.sr == double(hits) / n, tag + " pointing");
    c.expect(std::abs(dm.mad_cm - double(100 * mad / n)) < 1e-9 && dm.ratio_accuracy == double(accurate_n) / n,
             tag + " depth");
    c.expect(hit_rate_box(boxes) == double(box_hits) / n, tag + " box");
    c.expect(pm.step_acc == double(step_eq) / n && std::abs(pm.step_mae - double(step_abs) / n) < 1e-12 &&
                 pm.status_acc == double(status_eq) / n,
             tag + " planning");
  }

  std::vector<bool> seed_a(10, true), seed_b(10, true);
  seed_a[3] = false;
  const std::vector<std::vector<bool>> groups{seed_a, seed_b};
  const SuccessStats st = success_stats(groups);
  const auto ref = oracle::mean_sample_std({90.0, 100.0});
  c.expect(st.mean == 95.0 && std::abs(st.std - ref[1]) < kMetricTol && std::abs(st.std - 7.07) < 0.005,
           "success_stats {90,100} gave " + fmt(st.mean) + " +/- " + fmt(st.std, 6));
  return c.done("hand oracles agree; 10000 RMSE >= MAE; 0.119 accurate (1.9 cm); {90,100} -> " + fmt(st.mean) +
                " +/- " + fmt(st.std, 4));
}

Outcome simulator() {
  Checker c;
  const auto t0 = std::chrono::steady_clock::now();
  auto run = [&](sim::Scenario s, std::uint64_t seed) {
    sim::MockPlanner planner;
    sim::MockPolicy policy(s.config.step_length);
    return sim::run_episode(s, planner, policy, seed);
  };
  const sim::Scenario pick = sim::read_scenario(harness::scenarios() / "pick_place.json");
  int successes = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) successes += run(pick, seed).success;
  c.expect(successes == 100, "pick_place " + std::to_string(successes) + "/100");

  sim::Scenario displaced = sim::read_scenario(harness::scenarios() / "displaced_target.json");
  c.expect(!displaced.config.disturbances.empty(), "displaced_target has no disturbance");
  displaced.config.replan_interval = 1;
  const bool h1 = run(displaced, 0).success;
  displaced.config.replan_interval = 25;
  const sim::EpisodeResult h25 = run(displaced, 0);
  int plans = 0;
  for (const auto& r : h25.trace) plans += r.issue.has_value();
  c.expect(h1, "H=1 failed under displacement");
  c.expect(!h25.success, "H=25 succeeded under displacement");
  c.expect(plans == 1, "H=25 issued " + std::to_string(plans) + " plans");

  sim::Scenario chain = sim::read_scenario(harness::scenarios() / "three_stage_chain.json");
  c.expect(chain.config.stages.size() == 3, "chain does not have 3 stages");
  chain.config.stage_loop = true;
  const bool loop_on = run(chain, 0).success;
  chain.config.stage_loop = false;
  const bool loop_off = run(chain, 0).success;
  c.expect(loop_on, "chain failed with the stage loop");
  c.expect(!loop_off, "chain succeeded without the stage loop");

  const double elapsed = seconds_since(t0);
  c.expect(elapsed < kSimSuiteBudgetS, "suite took " + fmt(elapsed) + " s");
  return c.done("pick_place 100/100; displaced H=1 ok, H=25 fails; chain on ok, off fails; " + fmt(elapsed) + " s");
}

struct Invocation {
  std::string name;
  std::vector<std::string> args;
};

Outcome cli_determinism() {
  Checker c;
  harness::TempDir tmp("acc-determinism");
  const fs::path fx = harness::fixtures();
  const fs::path ex = fx / "extract", au = fx / "augment", ev = fx / "eval";
  fs::create_directories(tmp / "in");
  json::write_file(tmp / "in/pixels.json", json::Json::parse("[[12,30],[16,29],[20,28],[24,27],[28,26],[32,25],[36,24],[40,23]]"));
  json::write_file(tmp / "in/anchor.json",
                   json::Json::parse(R"({"d_start": 1.16, "offsets": [0.0, -0.01, -0.02, -0.03, -0.04, -0.05, -0.06]})"));
  const fs::path out = tmp / "out";
  std::vector<std::string> augment_args{"augment", "--rgb", (au / "rgb.png").string(), "--depth",
                                        (au / "depth.strf").string(), "--guidance", (au / "guidance.json").string(),
                                        "--intrinsics", (au / "intrinsics.json").string(), "--extrinsics",
                                        (au / "extrinsics.json").string()};
  for (const char* id : {"book", "cup", "plate"}) {
    augment_args.push_back("--mask");
    augment_args.push_back(std::string(id) + "=" + (au / (std::string("mask_") + id + ".png")).string());
  }
  auto with = [](std::vector<std::string> base, std::vector<std::string> more) {
    base.insert(base.end(), more.begin(), more.end());
    return base;
  };
  const std::vector<Invocation> runs{
      {"extract", {"extract", "--track", (ex / "track.json").string(), "--depth", (ex / "depth.strf").string(),
                   "--intrinsics", (ex / "intrinsics.json").string(), "--out", (out / "extract.json").string()}},
      {"extract-stdout", {"extract", "--track", (ex / "track.json").string(), "--depth", (ex / "depth.strf").string(),
                          "--intrinsics", (ex / "intrinsics.json").string(), "--out", "-", "--weights", "endpoint"}},
      {"lift", {"lift", "--pixels", (tmp / "in/pixels.json").string(), "--depth", (ex / "depth.strf").string(),
                "--intrinsics", (ex / "intrinsics.json").string(), "--anchor", (tmp / "in/anchor.json").string(),
                "--out", (out / "lift.json").string()}},
      {"augment-finetuned", with(augment_args, {"--mode", "finetuned", "--out-dir", (out / "aug_ft").string()})},
      {"augment-frozen", with(augment_args, {"--mode", "frozen", "--out-dir", (out / "aug_fz").string()})},
      {"gen-dataset", {"gen-dataset", "--root", (fx / "annotation").string(), "--out", (out / "dataset").string()}},
      {"gen-dataset-documents", {"gen-dataset", "--root", (fx / "annotation").string(), "--format", "documents",
                                 "--out", (out / "dataset_docs").string()}},
      {"eval-depth", {"eval", "--task", "depth", "--pred", (ev / "depth_pred.jsonl").string(), "--gt",
                      (ev / "depth_gt.jsonl").string(), "--table"}},
      {"eval-trajectory", {"eval", "--task", "trajectory", "--pred", (ev / "traj.jsonl").string(), "--gt",
                           (ev / "traj_short.jsonl").string(), "--resample", "--out", (out / "eval.json").string()}},
      {"eval-pointing", {"eval", "--task", "pointing", "--threshold", "5", "--pred", (ev / "points_pred.jsonl").string(),
                         "--gt", (ev / "points_gt.jsonl").string()}},
      {"simulate", {"simulate", "--scenario", (harness::scenarios() / "pick_place.json").string(), "--scenario",
                    (harness::scenarios() / "three_stage_chain.json").string(), "--seeds", "0-2", "--out-dir",
                    (out / "sim").string()}},
  };
  std::size_t files = 0;
  for (const Invocation& inv : runs) {
    std::vector<harness::ToolRun> results;
    std::vector<std::map<std::string, std::string>> snaps;
    for (int rep = 0; rep < 2; ++rep) {
      fs::remove_all(out);
      fs::create_directories(out);
      results.push_back(harness::run_tool(inv.args, tmp.path()));
      snaps.push_back(harness::snapshot(out));
    }
    c.expect(results[0].exit_code == 0, inv.name + " exit " + std::to_string(results[0].exit_code) + " " +
                                            results[0].err.substr(0, 200));
    c.expect(results[0].exit_code == results[1].exit_code && results[0].out == results[1].out &&
                 results[0].err == results[1].err,
             inv.name + " console output differs");
    c.expect(snaps[0] == snaps[1], inv.name + " output files differ");
    c.expect(!snaps[0].empty() || !results[0].out.empty(), inv.name + " produced nothing");
    files += snaps[0].size();
  }
  return c.done(std::to_string(runs.size()) + " invocations covering 6 subcommands, " + std::to_string(files) +
                " files byte-identical across re-runs");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"geometry-roundtrip", geometry_roundtrip},
      {"canonical-constants", canonical_constants},
      {"outlier-rejection", outlier_rejection},
      {"polyfit-optimality", polyfit_optimality},
      {"resampling", resampling},
      {"lift-anchor", lift_anchor},
      {"tube-relevance", tube_relevance},
      {"inpaint-maximum-principle", inpaint_maximum_principle},
      {"frozen-mode-contract", frozen_contract},
      {"dataset", dataset_criteria},
      {"metrics", metrics_criteria},
      {"simulator", simulator},
      {"cli-determinism", cli_determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %-27s %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
