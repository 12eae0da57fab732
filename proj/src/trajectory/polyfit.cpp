#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/QR>

#include "points.hpp"

namespace stguide {

std::vector<double> chordal_parameters(std::span<const Eigen::VectorXd> points) {
  std::vector<double> s(points.size(), 0.0);
  for (std::size_t i = 1; i < points.size(); ++i) {
    s[i] = s[i - 1] + (points[i] - points[i - 1]).norm();
  }
  const double total = s.empty() ? 0.0 : s.back();
  if (total > 0.0) {
    for (double& v : s) v /= total;
    s.back() = 1.0;
  }
  return s;
}

std::vector<double> fit_polynomial(std::span<const double> params, std::span<const double> values,
                                   std::span<const double> weights, int degree) {
  if (degree < 0) throw Error(ErrorCode::kInvalidArgument, "polynomial degree must be >= 0");
  if (params.size() != values.size() || (!weights.empty() && weights.size() != params.size())) {
    throw Error(ErrorCode::kDimensionMismatch, "fit inputs must have equal lengths");
  }
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidArgument, "fit weights must be positive and finite");
    }
  }
  std::vector<double> distinct(params.begin(), params.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  const auto terms = static_cast<std::size_t>(degree) + 1;
  if (distinct.size() < terms) {
    throw Error(ErrorCode::kRankDeficient,
                std::to_string(distinct.size()) + " distinct parameters cannot determine a degree-" +
                    std::to_string(degree) + " polynomial");
  }

  // Row-scaled Vandermonde system sqrt(w) V c = sqrt(w) y, solved by QR.
  const auto n = static_cast<Eigen::Index>(params.size());
  Eigen::MatrixXd design(n, static_cast<Eigen::Index>(terms));
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sw = weights.empty() ? 1.0 : std::sqrt(weights[i]);
    double power = 1.0;
    for (std::size_t j = 0; j < terms; ++j) {
      design(i, static_cast<Eigen::Index>(j)) = sw * power;
      power *= params[i];
    }
    rhs[i] = sw * values[i];
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < static_cast<Eigen::Index>(terms)) {
    throw Error(ErrorCode::kRankDeficient, "least-squares system is singular");
  }
  const Eigen::VectorXd coeffs = qr.solve(rhs);
  return {coeffs.data(), coeffs.data() + coeffs.size()};
}

std::vector<double> make_weights(std::size_t count, WeightProfile profile) {
  std::vector<double> w(count, 1.0);
  if (profile == WeightProfile::kEndpointEmphasis && count > 0) {
    w.front() = 2.0;
    w.back() = 2.0;
  }
  return w;
}

namespace detail {

std::vector<Eigen::VectorXd> smooth(const std::vector<Eigen::VectorXd>& points, int degree,
                                    std::span<const double> weights) {
  if (points.size() < static_cast<std::size_t>(degree) + 1) {
    throw Error(ErrorCode::kRankDeficient, "smoothing a degree-" + std::to_string(degree) +
                                              " fit needs at least " + std::to_string(degree + 1) +
                                              " waypoints");
  }
  if (!weights.empty() && weights.size() != points.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "one weight per waypoint required");
  }
  const std::vector<double> s = chordal_parameters(points);
  const auto dims = points.front().size();
  std::vector<Eigen::VectorXd> out(points.size(), Eigen::VectorXd(dims));
  std::vector<double> values(points.size());
  for (Eigen::Index d = 0; d < dims; ++d) {
    for (std::size_t i = 0; i < points.size(); ++i) values[i] = points[i][d];
    const std::vector<double> c = fit_polynomial(s, values, weights, degree);
    for (std::size_t i = 0; i < points.size(); ++i) {
      // Horner evaluation.
      double acc = 0.0;
      for (auto j = c.size(); j-- > 0;) acc = acc * s[i] + c[j];
      out[i][d] = acc;
    }
  }
  return out;
}

}  // namespace detail

Trajectory3D smooth_polyfit(const Trajectory3D& trajectory, int degree,
                            std::span<const double> weights) {
  return detail::to_trajectory3d(detail::smooth(detail::to_vectors(trajectory), degree, weights),
                                 trajectory.frame);
}

Trajectory2D smooth_polyfit(const Trajectory2D& trajectory, int degree,
                            std::span<const double> weights) {
  return detail::to_trajectory2d(detail::smooth(detail::to_vectors(trajectory), degree, weights));
}

}  // namespace stguide
