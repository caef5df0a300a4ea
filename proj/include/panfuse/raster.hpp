#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace panfuse {

/// Multi-band raster of 64-bit float samples, band-sequential layout
/// (all of band 0, then band 1, ...). Values are immutable by convention:
/// every operation returns a new raster.
struct Raster {
  int width = 0;
  int height = 0;
  int bands = 0;
  std::vector<double> samples;  // index: (b * height + y) * width + x

  std::vector<std::string> band_names;  // empty, or one entry per band
  // Dynamic range used by SSIM/PSNR. Metadata only; samples may exceed it.
  std::pair<double, double> nominal_range{0.0, 255.0};

  std::size_t pixel_count() const { return std::size_t(width) * height; }
  std::size_t sample_count() const { return pixel_count() * bands; }

  double at(int x, int y, int b) const {
    return samples[(std::size_t(b) * height + y) * width + x];
  }
  double& at(int x, int y, int b) {
    return samples[(std::size_t(b) * height + y) * width + x];
  }

  std::span<const double> band(int b) const {
    return {samples.data() + std::size_t(b) * pixel_count(), pixel_count()};
  }
  std::span<double> band(int b) {
    return {samples.data() + std::size_t(b) * pixel_count(), pixel_count()};
  }

  bool same_shape(const Raster& other) const {
    return width == other.width && height == other.height &&
           bands == other.bands;
  }
};

/// Validated construction. Throws invalid_argument on a sample-count
/// mismatch or non-finite samples.
Raster make_raster(int width, int height, int bands,
                   std::vector<double> samples);

/// New raster reusing `src` metadata (nominal range; band names when the
/// band count is unchanged).
Raster make_raster_like(const Raster& src, int width, int height, int bands,
                        std::vector<double> samples);

/// Per-pixel unweighted mean over bands; single-band output.
Raster to_intensity(const Raster& r);

// --- MSI container ---------------------------------------------------------
// Single file: magic "MSI1", u32-LE header length, UTF-8 JSON header
// {width, height, bands, dtype:"f64", layout:"BSQ", band_names?,
// nominal_range?}, then the raw little-endian f64 band-sequential payload.

void write_container(const Raster& r, const std::filesystem::path& path);
Raster read_container(const std::filesystem::path& path);

/// Payload section exactly as the container writer emits it.
std::vector<std::uint8_t> payload_bytes(const Raster& r);
std::uint32_t payload_crc32(const Raster& r);

// --- PNG interchange (8-bit gray / RGB only) -------------------------------

Raster import_png(const std::filesystem::path& path);
/// Requires 1 or 3 bands; rounds half-up and clamps to [0,255].
void export_png(const Raster& r, const std::filesystem::path& path);

}  // namespace panfuse
