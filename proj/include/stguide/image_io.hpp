#pragma once

#include <filesystem>

#include "stguide/raster.hpp"

namespace stguide::io {

// 8-bit RGB PNG (gray and RGBA inputs are converted).
RgbImage read_rgb_png(const std::filesystem::path& path);
void write_rgb_png(const std::filesystem::path& path, const RgbImage& image);

// 8-bit single-channel PNG; any nonzero value is set.
BinaryMask read_mask_png(const std::filesystem::path& path);
void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask);

// 16-bit single-channel PNG; meters = raw * scale, raw 0 is invalid.
DepthMap read_depth_png(const std::filesystem::path& path, double scale = 0.001);
void write_depth_png(const std::filesystem::path& path, const DepthMap& depth, double scale = 0.001);

// Raw float32 raster: "STRF" magic, uint32 width, uint32 height, float32
// scale, then width*height little-endian float32 samples (value * scale).
// Used for depth maps and weight maps.
Raster<float> read_float_raster(const std::filesystem::path& path);
void write_float_raster(const std::filesystem::path& path, const Raster<float>& raster,
                        float scale = 1.0f);

// Dispatches on extension: ".png" is 16-bit millimeter PNG (with `png_scale`),
// anything else the raw float32 format.
DepthMap read_depth(const std::filesystem::path& path, double png_scale = 0.001);
void write_depth(const std::filesystem::path& path, const DepthMap& depth, double png_scale = 0.001);

}  // namespace stguide::io
