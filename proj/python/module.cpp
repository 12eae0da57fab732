#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "stguide/dataset.hpp"
#include "stguide/guidance.hpp"
#include "stguide/metrics.hpp"
#include "stguide/sim.hpp"
#include "stguide/trajectory.hpp"

namespace py = pybind11;
using namespace stguide;

namespace {

using Intrinsics = std::tuple<double, double, double, double, int, int>;

CameraIntrinsics to_k(const Intrinsics& k) {
  const auto& [fx, fy, cx, cy, w, h] = k;
  return CameraIntrinsics(fx, fy, cx, cy, w, h);
}

template <typename T>
Raster<T> to_raster(const py::array_t<T, py::array::c_style | py::array::forcecast>& a, int channels) {
  if (channels == 1 ? a.ndim() != 2 : (a.ndim() != 3 || a.shape(2) != channels)) {
    throw Error(ErrorCode::kDimensionMismatch, "expected an array of shape (H, W" +
                                                   std::string(channels == 1 ? ")" : ", " + std::to_string(channels) + ")"));
  }
  Raster<T> r(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)), channels);
  std::memcpy(r.data().data(), a.data(), r.data().size() * sizeof(T));
  return r;
}

template <typename T>
py::array_t<T> to_array(const Raster<T>& r) {
  std::vector<py::ssize_t> shape{r.height(), r.width()};
  if (r.channels() > 1) shape.push_back(r.channels());
  py::array_t<T> a(shape);
  std::memcpy(a.mutable_data(), r.data().data(), r.data().size() * sizeof(T));
  return a;
}

py::array_t<double> points_array(const std::vector<Point3>& pts) {
  py::array_t<double> a({static_cast<py::ssize_t>(pts.size()), py::ssize_t{3}});
  auto m = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    m(i, 0) = pts[i].x;
    m(i, 1) = pts[i].y;
    m(i, 2) = pts[i].z;
  }
  return a;
}

Trajectory3D to_trajectory(const py::array_t<double, py::array::c_style | py::array::forcecast>& a, Frame frame) {
  if (a.ndim() != 2 || a.shape(1) != 3) throw Error(ErrorCode::kDimensionMismatch, "expected an (N, 3) array");
  auto v = a.unchecked<2>();
  Trajectory3D t;
  t.frame = frame;
  for (py::ssize_t i = 0; i < a.shape(0); ++i) t.waypoints.push_back({v(i, 0), v(i, 1), v(i, 2), frame});
  return t;
}

std::vector<Pixel> to_pixels(const std::vector<std::array<double, 2>>& pts) {
  std::vector<Pixel> out;
  for (const auto& p : pts) out.push_back({p[0], p[1]});
  return out;
}

py::dict trace_dict(const StageTrace& t) {
  py::list stages;
  for (const StageRecord& s : t.stages) {
    stages.append(py::dict(py::arg("name") = s.name, py::arg("input") = s.input_count,
                           py::arg("output") = s.output_count, py::arg("note") = s.note));
  }
  return py::dict(py::arg("stages") = stages, py::arg("epsilon") = t.epsilon, py::arg("degree_used") = t.degree_used,
                  py::arg("degree_degraded") = t.degree_degraded,
                  py::arg("degenerate_motion") = t.degenerate_motion);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Trajectory extraction, observation augmentation, metrics and episode simulation";

  static py::handle error = py::exception<Error>(m, "StguideError").release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      std::string msg = std::string(error_name(e.code())) + ": " + e.what();
      if (!e.stage().empty()) msg += " (stage " + e.stage() + ")";
      PyErr_SetString(error.ptr(), msg.c_str());
    }
  });

  m.def(
      "unproject",
      [](double u, double v, double z, const Intrinsics& k) {
        const Point3 p = unproject({u, v}, z, to_k(k));
        return std::array<double, 3>{p.x, p.y, p.z};
      },
      py::arg("u"), py::arg("v"), py::arg("z"), py::arg("intrinsics"));
  m.def(
      "project",
      [](const std::array<double, 3>& p, const Intrinsics& k) {
        const Pixel q = project({p[0], p[1], p[2]}, to_k(k));
        return std::array<double, 2>{q.u, q.v};
      },
      py::arg("point"), py::arg("intrinsics"));

  m.def(
      "extract",
      [](const std::vector<std::tuple<int, double, double>>& track, const py::array_t<float>& depth,
         const Intrinsics& k, std::optional<double> epsilon, int degree, int count) {
        Track2D t;
        for (const auto& [f, u, v] : track) t.entries.push_back({f, {u, v}});
        ExtractOptions o;
        o.epsilon = epsilon;
        o.degree = degree;
        o.k = count;
        const ExtractResult r = extract(t, to_raster<float>(depth, 1), to_k(k), o);
        return py::make_tuple(points_array(r.trajectory.waypoints), trace_dict(r.trace));
      },
      py::arg("track"), py::arg("depth"), py::arg("intrinsics"), py::arg("epsilon") = py::none(),
      py::arg("degree") = kSmoothingDegree, py::arg("k") = kCanonicalLength);

  m.def(
      "lift",
      [](const std::vector<std::array<double, 2>>& pixels, const py::array_t<float>& depth, const Intrinsics& k,
         double d_start, const std::vector<double>& offsets) {
        Trajectory2D t;
        t.waypoints = to_pixels(pixels);
        return points_array(lift_2d(t, to_raster<float>(depth, 1), to_k(k), {d_start, offsets}).waypoints);
      },
      py::arg("pixels"), py::arg("depth"), py::arg("intrinsics"), py::arg("d_start"), py::arg("offsets"));

  m.def(
      "augment",
      [](const py::array_t<std::uint8_t>& rgb, const py::array_t<float>& depth,
         const std::map<std::string, py::array_t<std::uint8_t>>& masks, const py::array_t<double>& trajectory,
         const Intrinsics& k, const std::string& mode, const std::vector<std::string>& relevant_ids,
         double tube_radius) {
        Observation obs{to_raster<std::uint8_t>(rgb, 3), to_raster<float>(depth, 1), {}};
        for (const auto& [id, mask] : masks) obs.masks.push_back({id, to_raster<std::uint8_t>(mask, 1)});
        GuidancePackage g;
        g.trajectory = to_trajectory(trajectory, Frame::kWorkspace);  // camera frame doubles as workspace
        g.relevant_ids = relevant_ids;
        if (mode != "frozen" && mode != "finetuned") throw Error(ErrorCode::kInvalidArgument, "mode: frozen or finetuned");
        GuidanceParams params;
        params.tube_radius = tube_radius;
        const AugmentedObservation a =
            augment(obs, g, mode == "frozen" ? AugmentMode::kFrozen : AugmentMode::kFinetuned, to_k(k),
                    RigidTransform::identity(), params);
        return py::dict(py::arg("rgb") = to_array(a.rgb), py::arg("depth") = to_array(a.depth),
                        py::arg("weights") = to_array(a.weights), py::arg("relevant_ids") = a.relevant_ids,
                        py::arg("fallback_id") = a.fallback_id);
      },
      py::arg("rgb"), py::arg("depth"), py::arg("masks"), py::arg("trajectory"), py::arg("intrinsics"),
      py::arg("mode") = "finetuned", py::arg("relevant_ids") = std::vector<std::string>{},
      py::arg("tube_radius") = GuidanceParams{}.tube_radius);

  m.def(
      "traj_errors",
      [](const std::vector<std::array<double, 2>>& pred, const std::vector<std::array<double, 2>>& truth) {
        const TrajectoryErrors e = traj_errors(to_pixels(pred), to_pixels(truth));
        return py::dict(py::arg("rmse") = e.rmse, py::arg("mae") = e.mae);
      },
      py::arg("pred"), py::arg("truth"));
  m.def(
      "pointing_stats",
      [](const std::vector<std::array<double, 2>>& pred, const std::vector<std::array<double, 2>>& truth,
         double threshold) {
        const PointingStats s = pointing_stats(to_pixels(pred), to_pixels(truth), threshold);
        return py::dict(py::arg("med") = s.med, py::arg("sr") = s.sr);
      },
      py::arg("pred"), py::arg("truth"), py::arg("threshold"));
  m.def(
      "depth_metrics",
      [](const std::vector<double>& pred, const std::vector<double>& truth) {
        if (pred.size() != truth.size()) throw Error(ErrorCode::kLengthMismatch, "pred and truth differ in length");
        std::vector<DepthPrediction> d;
        for (std::size_t i = 0; i < pred.size(); ++i) d.push_back({pred[i], truth[i]});
        const DepthMetrics r = depth_metrics(d);
        return py::dict(py::arg("ratio_accuracy") = r.ratio_accuracy, py::arg("mad_cm") = r.mad_cm);
      },
      py::arg("pred"), py::arg("truth"));
  m.def(
      "success_stats",
      [](const std::vector<double>& rates) {
        const SuccessStats s = success_stats_from_rates(rates);
        return py::make_tuple(s.mean, s.std);
      },
      py::arg("rates"));
  m.def("token_f1", [](const std::string& a, const std::string& b) { return token_f1(a, b); });

  m.def(
      "run_episode",
      [](const std::filesystem::path& scenario, std::uint64_t seed, std::optional<int> replan_interval) {
        sim::Scenario s = sim::read_scenario(scenario);
        if (replan_interval) s.config.replan_interval = *replan_interval;
        sim::MockPlanner planner;
        sim::MockPolicy policy(s.config.step_length);
        const sim::EpisodeResult r = sim::run_episode(s, planner, policy, seed);
        return py::dict(py::arg("success") = r.success, py::arg("steps_used") = r.steps_used,
                        py::arg("trace") = sim::to_json(r).dump());
      },
      py::arg("scenario"), py::arg("seed") = 0, py::arg("replan_interval") = py::none());

  m.def("data_dir", [] { return bundled_data_dir(); });
}
