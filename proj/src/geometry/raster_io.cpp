#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

#include "stguide/image_io.hpp"

namespace stguide::io {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) {
    throw Error(ErrorCode::kIo, "cannot open " + path.string());
  }
  return f;
}

[[noreturn]] void png_fail(png_structp, png_const_charp message) {
  throw Error(ErrorCode::kIo, std::string("png: ") + message);
}

void png_warn(png_structp, png_const_charp) {}

struct DecodedPng {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<std::uint8_t> bytes;  // row-major, big-endian for 16-bit
};

DecodedPng decode_png(const std::filesystem::path& path, bool keep_16bit) {
  FilePtr file = open_file(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
  if (png == nullptr) throw Error(ErrorCode::kIo, "png: out of memory");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_read_struct(png, info, nullptr); }
  } guard{&png, &info};

  png_init_io(png, file.get());
  png_read_info(png, info);
  const png_byte color_type = png_get_color_type(png, info);
  const png_byte depth = png_get_bit_depth(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (depth == 16 && !keep_16bit) png_set_strip_16(png);
  png_read_update_info(png, info);

  DecodedPng out;
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.channels = png_get_channels(png, info);
  out.bit_depth = png_get_bit_depth(png, info);
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  out.bytes.resize(row_bytes * out.height);
  std::vector<png_bytep> rows(out.height);
  for (int y = 0; y < out.height; ++y) rows[y] = out.bytes.data() + row_bytes * y;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  return out;
}

void encode_png(const std::filesystem::path& path, int width, int height, int color_type,
                int bit_depth, const std::vector<std::uint8_t>& bytes) {
  FilePtr file = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
  if (png == nullptr) throw Error(ErrorCode::kIo, "png: out of memory");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_write_struct(png, info); }
  } guard{&png, &info};

  png_init_io(png, file.get());
  png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const int channels = color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
  const std::size_t row_bytes = static_cast<std::size_t>(width) * channels * (bit_depth / 8);
  for (int y = 0; y < height; ++y) {
    png_write_row(png, bytes.data() + row_bytes * y);
  }
  png_write_end(png, nullptr);
}

}  // namespace

RgbImage read_rgb_png(const std::filesystem::path& path) {
  const DecodedPng png = decode_png(path, false);
  RgbImage image(png.width, png.height, 3);
  for (int y = 0; y < png.height; ++y) {
    for (int x = 0; x < png.width; ++x) {
      const std::uint8_t* px = png.bytes.data() + (static_cast<std::size_t>(y) * png.width + x) * png.channels;
      for (int c = 0; c < 3; ++c) {
        // Gray (+alpha) replicates channel 0.
        image.at(x, y, c) = png.channels >= 3 ? px[c] : px[0];
      }
    }
  }
  return image;
}

void write_rgb_png(const std::filesystem::path& path, const RgbImage& image) {
  if (image.channels() != 3) throw Error(ErrorCode::kInvalidArgument, "expected a 3-channel image");
  const auto data = image.data();
  encode_png(path, image.width(), image.height(), PNG_COLOR_TYPE_RGB, 8,
             std::vector<std::uint8_t>(data.begin(), data.end()));
}

BinaryMask read_mask_png(const std::filesystem::path& path) {
  const DecodedPng png = decode_png(path, false);
  BinaryMask mask(png.width, png.height);
  for (int y = 0; y < png.height; ++y) {
    for (int x = 0; x < png.width; ++x) {
      const std::uint8_t* px = png.bytes.data() + (static_cast<std::size_t>(y) * png.width + x) * png.channels;
      mask.at(x, y) = px[0] != 0 ? 1 : 0;
    }
  }
  return mask;
}

void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask) {
  std::vector<std::uint8_t> bytes(mask.pixel_count());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      bytes[static_cast<std::size_t>(y) * mask.width() + x] = mask.at(x, y) ? 255 : 0;
    }
  }
  encode_png(path, mask.width(), mask.height(), PNG_COLOR_TYPE_GRAY, 8, bytes);
}

DepthMap read_depth_png(const std::filesystem::path& path, double scale) {
  const DecodedPng png = decode_png(path, true);
  if (png.channels != 1 || png.bit_depth != 16) {
    throw Error(ErrorCode::kIo, path.string() + ": expected a 16-bit single-channel PNG");
  }
  DepthMap depth(png.width, png.height);
  for (int y = 0; y < png.height; ++y) {
    for (int x = 0; x < png.width; ++x) {
      const std::size_t i = (static_cast<std::size_t>(y) * png.width + x) * 2;
      const unsigned raw = (static_cast<unsigned>(png.bytes[i]) << 8) | png.bytes[i + 1];
      depth.at(x, y) = static_cast<float>(raw * scale);
    }
  }
  return depth;
}

void write_depth_png(const std::filesystem::path& path, const DepthMap& depth, double scale) {
  if (!(scale > 0.0)) throw Error(ErrorCode::kInvalidArgument, "depth scale must be positive");
  std::vector<std::uint8_t> bytes(depth.pixel_count() * 2);
  for (int y = 0; y < depth.height(); ++y) {
    for (int x = 0; x < depth.width(); ++x) {
      const double z = depth.at(x, y);
      unsigned raw = 0;
      if (valid_depth(z)) {
        raw = static_cast<unsigned>(std::clamp(std::round(z / scale), 1.0, 65535.0));
      }
      const std::size_t i = (static_cast<std::size_t>(y) * depth.width() + x) * 2;
      bytes[i] = static_cast<std::uint8_t>(raw >> 8);
      bytes[i + 1] = static_cast<std::uint8_t>(raw & 0xff);
    }
  }
  encode_png(path, depth.width(), depth.height(), PNG_COLOR_TYPE_GRAY, 16, bytes);
}

namespace {

constexpr char kRasterMagic[4] = {'S', 'T', 'R', 'F'};

template <typename T>
T to_little(T value) {
  static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<std::uint8_t, sizeof(T)>>(value);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return value;
}

template <typename T>
void put(std::ostream& out, T value) {
  value = to_little(value);
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in, const std::filesystem::path& path) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw Error(ErrorCode::kIo, path.string() + ": truncated raster");
  }
  return to_little(value);
}

}  // namespace

Raster<float> read_float_raster(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kRasterMagic, 4) != 0) {
    throw Error(ErrorCode::kIo, path.string() + ": bad raster magic");
  }
  const auto width = get<std::uint32_t>(in, path);
  const auto height = get<std::uint32_t>(in, path);
  const auto scale = get<float>(in, path);
  if (width > (1u << 16) || height > (1u << 16)) {
    throw Error(ErrorCode::kIo, path.string() + ": implausible raster size");
  }
  Raster<float> raster(static_cast<int>(width), static_cast<int>(height));
  for (float& v : raster.data()) v = get<float>(in, path) * scale;
  return raster;
}

void write_float_raster(const std::filesystem::path& path, const Raster<float>& raster, float scale) {
  if (raster.channels() != 1) throw Error(ErrorCode::kInvalidArgument, "expected a single-channel raster");
  if (!(scale > 0.0f)) throw Error(ErrorCode::kInvalidArgument, "raster scale must be positive");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  out.write(kRasterMagic, 4);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(raster.width()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(raster.height()));
  put<float>(out, scale);
  for (float v : raster.data()) put<float>(out, scale == 1.0f ? v : v / scale);
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

DepthMap read_depth(const std::filesystem::path& path, double png_scale) {
  if (path.extension() == ".png") return read_depth_png(path, png_scale);
  return read_float_raster(path);
}

void write_depth(const std::filesystem::path& path, const DepthMap& depth, double png_scale) {
  if (path.extension() == ".png") {
    write_depth_png(path, depth, png_scale);
  } else {
    write_float_raster(path, depth);
  }
}

}  // namespace stguide::io
