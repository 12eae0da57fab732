#include <algorithm>
#include <cmath>
#include <deque>
#include <vector>

#include "stguide/guidance.hpp"

namespace stguide {

namespace {

enum class Node : std::uint8_t { kIgnored, kSource, kHole };

struct Grid {
  int width;
  int height;
  std::vector<Node> nodes;
};

template <typename Fn>
void for_neighbors(const Grid& g, std::size_t i, Fn&& fn) {
  const int x = static_cast<int>(i % g.width);
  const int y = static_cast<int>(i / g.width);
  if (x > 0) fn(i - 1);
  if (x + 1 < g.width) fn(i + 1);
  if (y > 0) fn(i - g.width);
  if (y + 1 < g.height) fn(i + g.width);
}

// Harmonic fill of the hole nodes from the source nodes. Hole nodes
// unreachable from any source become kIgnored. Returns the iteration count.
int diffuse(Grid& g, std::vector<double>& x, bool edge_stopping, double kappa,
            const InpaintParams& params) {
  // Multi-source breadth-first initialization in row-major order.
  std::vector<std::uint8_t> reached(g.nodes.size(), 0);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (g.nodes[i] == Node::kSource) {
      reached[i] = 1;
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    for_neighbors(g, i, [&](std::size_t j) {
      if (g.nodes[j] == Node::kHole && !reached[j]) {
        reached[j] = 1;
        x[j] = x[i];
        queue.push_back(j);
      }
    });
  }
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (g.nodes[i] != Node::kHole) continue;
    if (reached[i]) {
      active.push_back(i);
    } else {
      g.nodes[i] = Node::kIgnored;
    }
  }
  if (active.empty()) return 0;

  const double inv_kappa2 = edge_stopping ? 1.0 / (kappa * kappa) : 0.0;
  int iteration = 0;
  while (iteration < params.max_iterations) {
    ++iteration;
    double max_update = 0.0;
    for (std::size_t i : active) {
      double num = 0.0;
      double den = 0.0;
      const double xi = x[i];
      for_neighbors(g, i, [&](std::size_t j) {
        if (g.nodes[j] == Node::kIgnored) return;
        const double diff = x[j] - xi;
        const double c = 1.0 / (1.0 + diff * diff * inv_kappa2);
        num += c * x[j];
        den += c;
      });
      if (den == 0.0) continue;
      const double next = num / den;
      max_update = std::max(max_update, std::abs(next - xi));
      x[i] = next;
    }
    if (max_update < params.tolerance) break;
  }
  return iteration;
}

}  // namespace

InpaintResult inpaint(const RgbImage& rgb, const DepthMap& depth, const WeightMap& weights,
                      const InpaintParams& params) {
  if (rgb.channels() != 3) throw Error(ErrorCode::kInvalidArgument, "rgb image must have 3 channels");
  if (!rgb.same_size(depth) || !rgb.same_size(weights)) {
    throw Error(ErrorCode::kDimensionMismatch, "rgb, depth and weight sizes differ");
  }
  if (params.max_iterations < 0 || !(params.tolerance >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid diffusion schedule");
  }
  const int w = rgb.width();
  const int h = rgb.height();
  const std::size_t n = rgb.pixel_count();
  auto wt = weights.data();

  InpaintResult result{rgb, depth, 0, 0, 0};
  std::vector<Node> base(n, Node::kSource);
  for (std::size_t i = 0; i < n; ++i) {
    if (wt[i] < params.threshold) {
      base[i] = Node::kHole;
      ++result.hole_pixels;
    }
  }
  if (result.hole_pixels == 0) return result;
  if (result.hole_pixels == n) {
    throw Error(ErrorCode::kHoleCoversImage, "no pixel has weight >= threshold");
  }

  auto src_rgb = rgb.data();
  auto out_rgb = result.rgb.data();
  std::vector<double> x(n);
  for (int c = 0; c < 3; ++c) {
    Grid g{w, h, base};
    for (std::size_t i = 0; i < n; ++i) x[i] = g.nodes[i] == Node::kSource ? src_rgb[i * 3 + c] : 0.0;
    const int iters = diffuse(g, x, params.edge_stopping_rgb, params.rgb_kappa, params);
    result.rgb_iterations = std::max(result.rgb_iterations, iters);
    for (std::size_t i = 0; i < n; ++i) {
      if (base[i] != Node::kHole) continue;
      const double wi = wt[i];
      const double blended = wi * src_rgb[i * 3 + c] + (1.0 - wi) * x[i];
      out_rgb[i * 3 + c] = static_cast<std::uint8_t>(std::clamp(std::round(blended), 0.0, 255.0));
    }
  }

  auto src_depth = depth.data();
  auto out_depth = result.depth.data();
  Grid g{w, h, base};
  for (std::size_t i = 0; i < n; ++i) {
    if (g.nodes[i] == Node::kSource && !valid_depth(src_depth[i])) g.nodes[i] = Node::kIgnored;
    x[i] = g.nodes[i] == Node::kSource ? src_depth[i] : 0.0;
  }
  result.depth_iterations = diffuse(g, x, params.edge_stopping_depth, params.depth_kappa, params);
  for (std::size_t i = 0; i < n; ++i) {
    if (base[i] != Node::kHole) continue;
    if (g.nodes[i] != Node::kHole) {
      out_depth[i] = 0.0f;
      continue;
    }
    const double wi = wt[i];
    const double value = valid_depth(src_depth[i]) ? wi * src_depth[i] + (1.0 - wi) * x[i] : x[i];
    out_depth[i] = static_cast<float>(value);
  }
  return result;
}

}  // namespace stguide
