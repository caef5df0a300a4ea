#pragma once

#include <vector>

#include "panfuse/raster.hpp"

namespace panfuse {

struct CalibrationParams {
  std::vector<double> gains;    // per band, all nonzero
  std::vector<double> offsets;  // per band
};

struct ShiftEstimate {
  int dx = 0;
  int dy = 0;
  double score = 0.0;  // normalized cross-correlation in [-1, 1]
};

enum class ResampleMethod { nearest, bilinear };

/// Pixel-center resampling: source coordinate of target t is
/// (t + 0.5) * src / dst - 0.5, clamped to the valid domain.
Raster resample(const Raster& r, int target_w, int target_h,
                ResampleMethod method);

/// Exhaustive integer-translation search maximizing normalized
/// cross-correlation over the overlap. The returned shift is the one to
/// feed apply_shift() so that the moving image lines up with the
/// reference. Ties go to the smallest |dx|+|dy|, then smallest dy, then dx.
ShiftEstimate estimate_shift(const Raster& reference_intensity,
                             const Raster& moving_intensity, int max_shift);

/// Translate by (dx, dy); vacated margins are edge-replicated.
Raster apply_shift(const Raster& r, int dx, int dy);

/// out = gain * in + offset, per band.
Raster radiometric_calibrate(const Raster& r, const CalibrationParams& p);

/// Dark-object subtraction: per band, subtract the nearest-rank lower
/// quantile at `percentile` and clamp at 0.
Raster dos_correct(const Raster& r, double percentile);

}  // namespace panfuse
