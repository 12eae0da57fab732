#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "stguide/guidance.hpp"

namespace stguide {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double parabola_cut(const std::vector<double>& f, int p, int q) {
  return ((f[q] + static_cast<double>(q) * q) - (f[p] + static_cast<double>(p) * p)) / (2.0 * (q - p));
}

// 1D squared distance transform of a sampled function (lower envelope of
// parabolas).
void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
            std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    double s = parabola_cut(f, v[k], q);
    while (s <= z[k]) {
      --k;
      s = parabola_cut(f, v[k], q);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (k < 0) {
    std::fill(d.begin(), d.end(), kInf);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double dq = q - v[j];
    d[q] = dq * dq + f[v[j]];
  }
}

}  // namespace

Raster<double> squared_distance_transform(const BinaryMask& seeds) {
  const int w = seeds.width();
  const int h = seeds.height();
  Raster<double> out(w, h, 1, kInf);
  const int n = std::max(w, h);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> v(n);

  for (int x = 0; x < w; ++x) {
    f.resize(h);
    d.resize(h);
    for (int y = 0; y < h; ++y) f[y] = seeds.at(x, y) ? 0.0 : kInf;
    edt_1d(f, d, v, z);
    for (int y = 0; y < h; ++y) out.at(x, y) = d[y];
  }
  for (int y = 0; y < h; ++y) {
    f.resize(w);
    d.resize(w);
    for (int x = 0; x < w; ++x) f[x] = out.at(x, y);
    edt_1d(f, d, v, z);
    for (int x = 0; x < w; ++x) out.at(x, y) = d[x];
  }
  return out;
}

double default_sigma(int width, int height) {
  return 8.0 * std::hypot(width, height) / std::hypot(256.0, 256.0);
}

WeightMapResult smooth_weight_map(const BinaryMask& relevant, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::kInvalidArgument, "sigma must be positive");
  }
  WeightMapResult result{WeightMap(relevant.width(), relevant.height(), 1, 1.0f), false};
  bool any = false;
  for (auto value : relevant.data()) any = any || value != 0;
  if (!any) {
    result.no_relevant_mask = true;
    return result;
  }
  const Raster<double> d2 = squared_distance_transform(relevant);
  const double denom = 2.0 * sigma * sigma;
  auto src = d2.data();
  auto dst = result.weights.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = src[i] == 0.0 ? 1.0f : static_cast<float>(std::exp(-src[i] / denom));
  }
  return result;
}

WeightMapResult smooth_weight_map(std::span<const InstanceMask> relevant, int width, int height,
                                  double sigma) {
  BinaryMask combined(width, height);
  for (const InstanceMask& m : relevant) {
    if (!m.mask.same_size(width, height)) {
      throw Error(ErrorCode::kDimensionMismatch, "mask '" + m.id + "' has the wrong size");
    }
    auto src = m.mask.data();
    auto dst = combined.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = dst[i] || src[i] ? 1 : 0;
  }
  return smooth_weight_map(combined, sigma);
}

}  // namespace stguide
