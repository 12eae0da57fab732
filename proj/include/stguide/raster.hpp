#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "stguide/error.hpp"

namespace stguide {

// Dense row-major image with interleaved channels.
template <typename T>
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, int channels = 1, T fill = T{})
      : width_(width), height_(height), channels_(channels) {
    if (width < 0 || height < 0 || channels <= 0) {
      throw Error(ErrorCode::kInvalidArgument, "raster dimensions must be non-negative");
    }
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * height_;
  }
  bool empty() const noexcept { return data_.empty(); }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  T& at(int x, int y, int c = 0) noexcept { return data_[index(x, y, c)]; }
  const T& at(int x, int y, int c = 0) const noexcept { return data_[index(x, y, c)]; }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  bool same_size(int width, int height) const noexcept {
    return width_ == width && height_ == height;
  }
  template <typename U>
  bool same_size(const Raster<U>& other) const noexcept {
    return same_size(other.width(), other.height());
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<T> data_;
};

// Metric depth in meters; a pixel is valid iff its value is finite and > 0.
using DepthMap = Raster<float>;
// 8-bit RGB, three interleaved channels.
using RgbImage = Raster<std::uint8_t>;
// Single-channel mask; nonzero means set.
using BinaryMask = Raster<std::uint8_t>;
// Per-pixel relevance weight in [0, 1].
using WeightMap = Raster<float>;

inline bool valid_depth(double z) noexcept { return std::isfinite(z) && z > 0.0; }

inline RgbImage make_rgb(int width, int height) { return RgbImage(width, height, 3); }

}  // namespace stguide
