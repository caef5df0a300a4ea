#include "panfuse/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "imageops.hpp"
#include "panfuse/errors.hpp"

namespace panfuse {

namespace {

// Pixel-center mapping from target index to source coordinate.
inline double src_coord(int t, int src_dim, int dst_dim) {
  const double c = (double(t) + 0.5) * double(src_dim) / double(dst_dim) - 0.5;
  return std::clamp(c, 0.0, double(src_dim - 1));
}

}  // namespace

Raster resample(const Raster& r, int target_w, int target_h,
                ResampleMethod method) {
  if (target_w < 1 || target_h < 1)
    fail(ErrorCode::invalid_argument, "target dimensions must be >= 1");
  if (target_w == r.width && target_h == r.height) return r;

  std::vector<double> xs(target_w), ys(target_h);
  for (int x = 0; x < target_w; ++x) xs[x] = src_coord(x, r.width, target_w);
  for (int y = 0; y < target_h; ++y) ys[y] = src_coord(y, r.height, target_h);

  std::vector<double> out(std::size_t(target_w) * target_h * r.bands);
  detail::parallel_for(r.bands, [&](int b) {
    const std::size_t base = std::size_t(b) * target_w * target_h;
    for (int y = 0; y < target_h; ++y) {
      for (int x = 0; x < target_w; ++x) {
        double v;
        if (method == ResampleMethod::nearest) {
          const int sx = int(std::floor(xs[x] + 0.5));
          const int sy = int(std::floor(ys[y] + 0.5));
          v = r.at(sx, sy, b);
        } else {
          const int x0 = int(std::floor(xs[x]));
          const int y0 = int(std::floor(ys[y]));
          const int x1 = std::min(x0 + 1, r.width - 1);
          const int y1 = std::min(y0 + 1, r.height - 1);
          const double fx = xs[x] - x0;
          const double fy = ys[y] - y0;
          v = (1.0 - fy) * ((1.0 - fx) * r.at(x0, y0, b) + fx * r.at(x1, y0, b)) +
              fy * ((1.0 - fx) * r.at(x0, y1, b) + fx * r.at(x1, y1, b));
        }
        out[base + std::size_t(y) * target_w + x] = v;
      }
    }
  });
  return make_raster_like(r, target_w, target_h, r.bands, std::move(out));
}

ShiftEstimate estimate_shift(const Raster& reference_intensity,
                             const Raster& moving_intensity, int max_shift) {
  const Raster& ref = reference_intensity;
  const Raster& mov = moving_intensity;
  if (ref.bands != 1 || mov.bands != 1)
    fail(ErrorCode::invalid_argument, "estimate_shift needs single-band inputs");
  if (ref.width != mov.width || ref.height != mov.height)
    fail(ErrorCode::invalid_argument, "estimate_shift needs equal dimensions");
  if (max_shift < 0)
    fail(ErrorCode::invalid_argument, "max_shift must be >= 0");

  bool found = false;
  ShiftEstimate best;
  std::vector<double> a, b;
  for (int dy = -max_shift; dy <= max_shift; ++dy) {
    for (int dx = -max_shift; dx <= max_shift; ++dx) {
      // Hypothesis: mov(x, y) == ref(x + dx, y + dy) over the overlap.
      const int x0 = std::max(0, -dx), x1 = std::min(ref.width, ref.width - dx);
      const int y0 = std::max(0, -dy), y1 = std::min(ref.height, ref.height - dy);
      if (x1 - x0 < 1 || y1 - y0 < 1) continue;
      a.clear();
      b.clear();
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) {
          a.push_back(mov.at(x, y, 0));
          b.push_back(ref.at(x + dx, y + dy, 0));
        }
      bool degenerate = false;
      const double score = detail::pearson(a, b, &degenerate);
      if (degenerate) continue;
      const bool better =
          !found || score > best.score ||
          (score == best.score &&
           (std::abs(dx) + std::abs(dy) < std::abs(best.dx) + std::abs(best.dy) ||
            (std::abs(dx) + std::abs(dy) ==
                 std::abs(best.dx) + std::abs(best.dy) &&
             (dy < best.dy || (dy == best.dy && dx < best.dx)))));
      if (better) {
        best = {dx, dy, score};
        found = true;
      }
    }
  }
  if (!found)
    fail(ErrorCode::degenerate_input,
         "zero-variance overlap for every candidate shift");
  return best;
}

Raster apply_shift(const Raster& r, int dx, int dy) {
  if (std::abs(dx) >= r.width || std::abs(dy) >= r.height)
    fail(ErrorCode::invalid_argument, "shift exceeds raster dimensions");
  std::vector<double> out(r.sample_count());
  for (int b = 0; b < r.bands; ++b) {
    const std::size_t base = std::size_t(b) * r.pixel_count();
    for (int y = 0; y < r.height; ++y) {
      const int sy = std::clamp(y - dy, 0, r.height - 1);
      for (int x = 0; x < r.width; ++x) {
        const int sx = std::clamp(x - dx, 0, r.width - 1);
        out[base + std::size_t(y) * r.width + x] = r.at(sx, sy, b);
      }
    }
  }
  return make_raster_like(r, r.width, r.height, r.bands, std::move(out));
}

Raster radiometric_calibrate(const Raster& r, const CalibrationParams& p) {
  if (int(p.gains.size()) != r.bands || int(p.offsets.size()) != r.bands)
    fail(ErrorCode::invalid_argument,
         "calibration parameters need one gain and offset per band (bands=" +
             std::to_string(r.bands) + ", gains=" +
             std::to_string(p.gains.size()) + ", offsets=" +
             std::to_string(p.offsets.size()) + ")");
  for (double g : p.gains)
    if (g == 0.0)
      fail(ErrorCode::invalid_argument, "calibration gains must be nonzero");
  std::vector<double> out(r.sample_count());
  const std::size_t plane = r.pixel_count();
  for (int b = 0; b < r.bands; ++b)
    for (std::size_t i = 0; i < plane; ++i)
      out[b * plane + i] = p.gains[b] * r.samples[b * plane + i] + p.offsets[b];
  return make_raster_like(r, r.width, r.height, r.bands, std::move(out));
}

Raster dos_correct(const Raster& r, double percentile) {
  if (!(percentile >= 0.0 && percentile <= 0.5))
    fail(ErrorCode::invalid_argument, "percentile must lie in [0, 0.5]");
  std::vector<double> out(r.sample_count());
  const std::size_t plane = r.pixel_count();
  std::vector<double> sorted(plane);
  for (int b = 0; b < r.bands; ++b) {
    const auto band = r.band(b);
    std::copy(band.begin(), band.end(), sorted.begin());
    std::sort(sorted.begin(), sorted.end());
    // nearest-rank lower quantile: rank = max(1, ceil(p * n))
    const std::size_t rank = std::max<std::size_t>(
        1, std::size_t(std::ceil(percentile * double(plane))));
    const double dark = sorted[rank - 1];
    for (std::size_t i = 0; i < plane; ++i)
      out[b * plane + i] = std::max(0.0, r.samples[b * plane + i] - dark);
  }
  return make_raster_like(r, r.width, r.height, r.bands, std::move(out));
}

}  // namespace panfuse
