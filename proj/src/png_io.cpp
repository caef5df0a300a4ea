#include <png.h>

#include <cmath>
#include <cstdio>
#include <vector>

#include "panfuse/errors.hpp"
#include "panfuse/raster.hpp"

namespace panfuse {

namespace {

struct FileCloser {
  std::FILE* f = nullptr;
  ~FileCloser() {
    if (f) std::fclose(f);
  }
};

}  // namespace

Raster import_png(const std::filesystem::path& path) {
  FileCloser file;
  file.f = std::fopen(path.string().c_str(), "rb");
  if (!file.f) fail(ErrorCode::io, "cannot open for reading: " + path.string());

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorCode::io, "libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorCode::parse, "invalid PNG file: " + path.string());
  }
  png_init_io(png, file.f);
  png_read_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);

  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);
  const int width = int(png_get_image_width(png, info));
  const int height = int(png_get_image_height(png, info));
  if (bit_depth != 8 ||
      (color_type != PNG_COLOR_TYPE_GRAY && color_type != PNG_COLOR_TYPE_RGB)) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorCode::unsupported,
         "unsupported PNG format (need 8-bit gray or RGB): " + path.string());
  }
  const int channels = color_type == PNG_COLOR_TYPE_GRAY ? 1 : 3;

  png_bytepp rows = png_get_rows(png, info);
  std::vector<double> samples(std::size_t(width) * height * channels);
  const std::size_t plane = std::size_t(width) * height;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      for (int c = 0; c < channels; ++c)
        samples[c * plane + std::size_t(y) * width + x] =
            double(rows[y][x * channels + c]);
  png_destroy_read_struct(&png, &info, nullptr);
  return make_raster(width, height, channels, std::move(samples));
}

void export_png(const Raster& r, const std::filesystem::path& path) {
  if (r.bands != 1 && r.bands != 3)
    fail(ErrorCode::unsupported,
         "unsupported band count for PNG export (need 1 or 3, got " +
             std::to_string(r.bands) + ")");

  const int channels = r.bands;
  const std::size_t plane = r.pixel_count();
  std::vector<png_byte> data(plane * channels);
  for (int y = 0; y < r.height; ++y)
    for (int x = 0; x < r.width; ++x)
      for (int c = 0; c < channels; ++c) {
        // round half-up, clamp to [0, 255]
        const double v =
            std::floor(r.samples[c * plane + std::size_t(y) * r.width + x] + 0.5);
        data[(std::size_t(y) * r.width + x) * channels + c] =
            png_byte(v < 0.0 ? 0.0 : (v > 255.0 ? 255.0 : v));
      }

  FileCloser file;
  file.f = std::fopen(path.string().c_str(), "wb");
  if (!file.f) fail(ErrorCode::io, "cannot open for writing: " + path.string());

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorCode::io, "libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorCode::io, "PNG write failed: " + path.string());
  }
  png_init_io(png, file.f);
  png_set_IHDR(png, info, png_uint_32(r.width), png_uint_32(r.height), 8,
               channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  std::vector<png_bytep> rows(r.height);
  for (int y = 0; y < r.height; ++y)
    rows[y] = data.data() + std::size_t(y) * r.width * channels;
  png_set_rows(png, info, rows.data());
  png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace panfuse
