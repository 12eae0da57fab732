#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stguide/geometry.hpp"
#include "stguide/serialization.hpp"

namespace stguide {

// Order-independent floating-point accumulation: the result is the correctly
// rounded sum regardless of insertion order or merge grouping.
class ExactSum {
 public:
  void add(double x);
  void merge(const ExactSum& other);
  double value() const;
  std::size_t count() const noexcept { return count_; }

 private:
  std::vector<double> partials_;
  double nonfinite_ = 0.0;
  bool has_nonfinite_ = false;
  std::size_t count_ = 0;
};

double exact_sum(std::span<const double> values);
// Throws EmptySet.
double exact_mean(std::span<const double> values);

struct Box {
  double min_u = 0.0;
  double min_v = 0.0;
  double max_u = 0.0;
  double max_v = 0.0;
};

// Inclusive on every edge.
bool box_contains(const Box& box, const Pixel& p);

struct BoxPrediction {
  Pixel point;
  Box box;
};

// `mask` is not owned.
struct MaskPrediction {
  Pixel point;
  const BinaryMask* mask = nullptr;
};

double hit_rate_box(std::span<const BoxPrediction> predictions);
// Points are rounded to the nearest pixel; off-image points miss.
double hit_rate_mask(std::span<const MaskPrediction> predictions);

struct PointingStats {
  double med = 0.0;  // mean Euclidean distance
  double sr = 0.0;   // fraction with distance < threshold
};

PointingStats pointing_stats(std::span<const Pixel> predicted, std::span<const Pixel> truth, double threshold);

struct TrajectoryErrors {
  double rmse = 0.0;
  double mae = 0.0;
};

// Index-aligned per-point Euclidean errors. Throws LengthMismatch.
TrajectoryErrors traj_errors(std::span<const Pixel> predicted, std::span<const Pixel> truth);
// Mean of the per-pair RMSE and MAE values.
TrajectoryErrors mean_traj_errors(std::span<const TrajectoryErrors> pairs);

struct DepthPrediction {
  double predicted = 0.0;
  double truth = 0.0;
};

struct DepthMetrics {
  double ratio_accuracy = 0.0;  // |pred - gt| <= 0.20 gt
  double mad_cm = 0.0;
};

inline constexpr double kDepthRatioThreshold = 0.20;

DepthMetrics depth_metrics(std::span<const DepthPrediction> predictions);

struct PlanningPrediction {
  int predicted_step = 1;
  int true_step = 1;
  bool predicted_finished = false;
  bool true_finished = false;
  std::optional<std::vector<Pixel>> predicted_trajectory;
  std::optional<std::vector<Pixel>> true_trajectory;
};

struct PlanningMetrics {
  double step_acc = 0.0;
  double step_mae = 0.0;
  double status_acc = 0.0;
  // Over predictions carrying both trajectories.
  std::optional<TrajectoryErrors> trajectory;
};

PlanningMetrics planning_metrics(std::span<const PlanningPrediction> predictions);

struct SuccessStats {
  double mean = 0.0;  // percent
  double std = 0.0;   // percent, ddof = 1; 0 for a single seed
  std::vector<double> per_seed;
};

// One group of episode outcomes per seed. Throws EmptyGroup.
SuccessStats success_stats(std::span<const std::vector<bool>> groups);
SuccessStats success_stats_from_rates(std::span<const double> percentages);

// ---- Text similarity ------------------------------------------------------

using TextScorer = std::function<double(std::string_view predicted, std::string_view truth)>;

// Lower-cased alphanumeric tokens, multiset F1. Not a learned similarity.
double token_f1(std::string_view predicted, std::string_view truth);

class ScorerRegistry {
 public:
  static ScorerRegistry with_defaults();  // "token_f1"

  void add(std::string name, TextScorer scorer);
  // Throws NoScorer.
  const TextScorer& get(std::string_view name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, TextScorer, std::less<>> scorers_;
};

inline constexpr std::string_view kDefaultScorer = "token_f1";

double text_similarity(std::string_view predicted, std::string_view truth, const ScorerRegistry& registry,
                       std::string_view scorer = kDefaultScorer);

// ---- Reports --------------------------------------------------------------

enum class EvalTask { kPointing, kPointingBox, kPointingMask, kTrajectory, kDepth, kPlanning, kText };

std::string_view eval_task_name(EvalTask task);
std::optional<EvalTask> parse_eval_task(std::string_view name);

struct EvalOptions {
  std::optional<double> threshold;  // required for kPointing
  bool resample = false;            // canonicalize trajectories to 8 points first
  std::string scorer{kDefaultScorer};
  std::filesystem::path mask_root;  // resolves relative mask paths
};

struct MetricReport {
  std::string task;
  std::size_t count = 0;
  std::vector<std::pair<std::string, double>> metrics;
  json::Json parameters = json::Json::object();
};

// Records are index-aligned; matching "id" fields are required when both
// sides carry one. Throws LengthMismatch, SchemaViolation, InvalidArgument.
MetricReport evaluate(EvalTask task, const std::vector<json::Json>& predicted, const std::vector<json::Json>& truth,
                      const EvalOptions& options = {}, const ScorerRegistry& registry = ScorerRegistry::with_defaults());

json::Json to_json(const MetricReport& report);
std::string to_text_table(const MetricReport& report);

std::vector<json::Json> read_jsonl(const std::filesystem::path& path);

}  // namespace stguide
