#include "bopeval/depth_png.hpp"

#include "bopeval/error.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>
#include <string>

namespace bopeval {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) {
    throw InputError(std::string("cannot open ") + path.string());
  }
  return f;
}

[[noreturn]] void png_error_handler(png_structp png, png_const_charp msg) {
  auto* what = static_cast<std::string*>(png_get_error_ptr(png));
  *what = msg;
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

}  // namespace

Gray16Image read_png16(const std::filesystem::path& path) {
  FilePtr file = open_file(path, "rb");
  unsigned char signature[8];
  if (std::fread(signature, 1, 8, file.get()) != 8 || png_sig_cmp(signature, 0, 8) != 0) {
    throw InputError(path.string() + ": not a PNG file");
  }

  std::string error;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error,
                                           png_error_handler, png_warning_handler);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw InputError("libpng initialization failed");
  }

  Gray16Image image;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw InputError(path.string() + ": " + error);
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const auto bit_depth = png_get_bit_depth(png, info);
  const auto color_type = png_get_color_type(png, info);
  if (bit_depth != 16 || color_type != PNG_COLOR_TYPE_GRAY) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw InputError(path.string() + ": expected a 16-bit grayscale PNG");
  }
  png_set_swap(png);  // PNG stores 16-bit samples big-endian
  image.width = static_cast<int>(png_get_image_width(png, info));
  image.height = static_cast<int>(png_get_image_height(png, info));
  image.pixels.resize(std::size_t(image.width) * image.height);
  rows.resize(image.height);
  for (int v = 0; v < image.height; ++v) {
    rows[v] = reinterpret_cast<png_bytep>(&image.pixels[std::size_t(v) * image.width]);
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return image;
}

void write_png16(const std::filesystem::path& path, const Gray16Image& image) {
  FilePtr file = open_file(path, "wb");
  std::string error;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error,
                                            png_error_handler, png_warning_handler);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw InputError("libpng initialization failed");
  }
  std::vector<png_bytep> rows(image.height);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw InputError(path.string() + ": " + error);
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, image.width, image.height, 16, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_set_swap(png);
  for (int v = 0; v < image.height; ++v) {
    rows[v] = reinterpret_cast<png_bytep>(
        const_cast<std::uint16_t*>(&image.pixels[std::size_t(v) * image.width]));
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

DepthMap read_depth_png(const std::filesystem::path& path, double depth_scale) {
  if (!(depth_scale > 0.0) || !std::isfinite(depth_scale)) {
    throw InputError("depth_scale must be positive and finite");
  }
  const Gray16Image raw = read_png16(path);
  DepthMap depth(raw.width, raw.height);
  for (std::size_t i = 0; i < raw.pixels.size(); ++i) {
    depth.values[i] = raw.pixels[i] * depth_scale;
  }
  return depth;
}

void write_depth_png(const std::filesystem::path& path, const DepthMap& depth,
                     double depth_scale) {
  if (!(depth_scale > 0.0)) throw InputError("depth_scale must be positive");
  Gray16Image raw{depth.width, depth.height, {}};
  raw.pixels.resize(depth.values.size());
  for (std::size_t i = 0; i < depth.values.size(); ++i) {
    const double q = std::round(depth.values[i] / depth_scale);
    if (!(q >= 0.0) || q > 65535.0) {
      throw InputError("depth " + std::to_string(depth.values[i]) +
                       " mm does not fit a 16-bit PNG at scale " +
                       std::to_string(depth_scale));
    }
    raw.pixels[i] = static_cast<std::uint16_t>(q);
  }
  write_png16(path, raw);
}

}  // namespace bopeval
