#include <cmath>
#include <cstdlib>

#include "stguide/metrics.hpp"

namespace stguide {

namespace {

template <typename T>
void require_nonempty(std::span<const T> values, const char* what) {
  if (values.empty()) throw Error(ErrorCode::kEmptySet, std::string(what) + ": empty input");
}

double fraction(std::size_t hits, std::size_t total) {
  return static_cast<double>(hits) / static_cast<double>(total);
}

double mean_of(const ExactSum& s) { return s.value() / static_cast<double>(s.count()); }

}  // namespace

bool box_contains(const Box& box, const Pixel& p) {
  return p.u >= box.min_u && p.u <= box.max_u && p.v >= box.min_v && p.v <= box.max_v;
}

double hit_rate_box(std::span<const BoxPrediction> predictions) {
  require_nonempty(predictions, "hit_rate_box");
  std::size_t hits = 0;
  for (const BoxPrediction& p : predictions) {
    if (!(p.box.min_u <= p.box.max_u && p.box.min_v <= p.box.max_v)) {
      throw Error(ErrorCode::kInvalidArgument, "box with min > max");
    }
    if (box_contains(p.box, p.point)) ++hits;
  }
  return fraction(hits, predictions.size());
}

double hit_rate_mask(std::span<const MaskPrediction> predictions) {
  require_nonempty(predictions, "hit_rate_mask");
  std::size_t hits = 0;
  for (const MaskPrediction& p : predictions) {
    if (!p.mask) throw Error(ErrorCode::kInvalidArgument, "mask prediction without a mask");
    const double u = std::round(p.point.u);
    const double v = std::round(p.point.v);
    if (!(u >= 0.0 && v >= 0.0 && u < p.mask->width() && v < p.mask->height())) continue;
    if (p.mask->at(static_cast<int>(u), static_cast<int>(v))) ++hits;
  }
  return fraction(hits, predictions.size());
}

PointingStats pointing_stats(std::span<const Pixel> predicted, std::span<const Pixel> truth, double threshold) {
  if (predicted.size() != truth.size()) {
    throw Error(ErrorCode::kLengthMismatch, "prediction and ground-truth counts differ");
  }
  require_nonempty(predicted, "pointing_stats");
  if (!(threshold > 0.0) || !std::isfinite(threshold)) {
    throw Error(ErrorCode::kInvalidArgument, "pixel threshold must be positive");
  }
  ExactSum distance;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = std::hypot(predicted[i].u - truth[i].u, predicted[i].v - truth[i].v);
    distance.add(d);
    if (d < threshold) ++hits;
  }
  return {mean_of(distance), fraction(hits, predicted.size())};
}

TrajectoryErrors traj_errors(std::span<const Pixel> predicted, std::span<const Pixel> truth) {
  if (predicted.size() != truth.size()) {
    throw Error(ErrorCode::kLengthMismatch, "trajectory lengths differ (" + std::to_string(predicted.size()) +
                                                " vs " + std::to_string(truth.size()) + ")");
  }
  require_nonempty(predicted, "traj_errors");
  ExactSum abs_sum;
  ExactSum sq_sum;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double du = predicted[i].u - truth[i].u;
    const double dv = predicted[i].v - truth[i].v;
    abs_sum.add(std::hypot(du, dv));
    sq_sum.add(du * du);
    sq_sum.add(dv * dv);
  }
  const double n = static_cast<double>(predicted.size());
  return {std::sqrt(sq_sum.value() / n), abs_sum.value() / n};
}

TrajectoryErrors mean_traj_errors(std::span<const TrajectoryErrors> pairs) {
  require_nonempty(pairs, "mean_traj_errors");
  ExactSum rmse;
  ExactSum mae;
  for (const TrajectoryErrors& e : pairs) {
    rmse.add(e.rmse);
    mae.add(e.mae);
  }
  return {mean_of(rmse), mean_of(mae)};
}

DepthMetrics depth_metrics(std::span<const DepthPrediction> predictions) {
  require_nonempty(predictions, "depth_metrics");
  ExactSum deviation;
  std::size_t accurate = 0;
  for (const DepthPrediction& p : predictions) {
    if (!(p.truth > 0.0) || !std::isfinite(p.truth)) {
      throw Error(ErrorCode::kNonPositiveGroundTruth, "ground-truth depth must be > 0");
    }
    const double err = std::abs(p.predicted - p.truth);
    if (err <= kDepthRatioThreshold * p.truth) ++accurate;
    deviation.add(err);
  }
  return {fraction(accurate, predictions.size()), mean_of(deviation) * 100.0};
}

PlanningMetrics planning_metrics(std::span<const PlanningPrediction> predictions) {
  require_nonempty(predictions, "planning_metrics");
  std::size_t exact = 0;
  std::size_t status = 0;
  ExactSum step_error;
  std::vector<TrajectoryErrors> traj;
  for (const PlanningPrediction& p : predictions) {
    if (p.predicted_step < 1 || p.true_step < 1) {
      throw Error(ErrorCode::kInvalidArgument, "step indices start at 1");
    }
    if (p.predicted_step == p.true_step) ++exact;
    if (p.predicted_finished == p.true_finished) ++status;
    step_error.add(std::abs(p.predicted_step - p.true_step));
    if (p.predicted_trajectory && p.true_trajectory) {
      traj.push_back(traj_errors(*p.predicted_trajectory, *p.true_trajectory));
    }
  }
  PlanningMetrics m{fraction(exact, predictions.size()), mean_of(step_error), fraction(status, predictions.size()),
                    std::nullopt};
  if (!traj.empty()) m.trajectory = mean_traj_errors(traj);
  return m;
}

SuccessStats success_stats_from_rates(std::span<const double> percentages) {
  if (percentages.empty()) throw Error(ErrorCode::kEmptyGroup, "no seed groups");
  SuccessStats s;
  s.per_seed.assign(percentages.begin(), percentages.end());
  s.mean = exact_mean(percentages);
  if (percentages.size() > 1) {
    ExactSum sq;
    for (double r : percentages) sq.add((r - s.mean) * (r - s.mean));
    s.std = std::sqrt(sq.value() / static_cast<double>(percentages.size() - 1));
  }
  return s;
}

SuccessStats success_stats(std::span<const std::vector<bool>> groups) {
  if (groups.empty()) throw Error(ErrorCode::kEmptyGroup, "no seed groups");
  std::vector<double> rates;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) throw Error(ErrorCode::kEmptyGroup, "seed group " + std::to_string(g) + " is empty");
    std::size_t wins = 0;
    for (bool ok : groups[g]) wins += ok ? 1 : 0;
    rates.push_back(100.0 * fraction(wins, groups[g].size()));
  }
  return success_stats_from_rates(rates);
}

}  // namespace stguide
