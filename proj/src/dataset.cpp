#include "panfuse/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "imageops.hpp"
#include "panfuse/errors.hpp"

namespace panfuse {

namespace {

void validate_spec(const SceneSpec& spec) {
  if (spec.side < 32 || (spec.side & (spec.side - 1)) != 0)
    fail(ErrorCode::invalid_argument,
         "scene side must be a power of two >= 32 (got " +
             std::to_string(spec.side) + ")");
  if (spec.bands < 2)
    fail(ErrorCode::invalid_argument, "scene needs at least 2 bands");
  if (spec.n_blobs < 0 || spec.n_shapes < 0)
    fail(ErrorCode::invalid_argument, "blob/shape counts must be >= 0");
  if (!(spec.value_range.first < spec.value_range.second))
    fail(ErrorCode::invalid_argument, "value_range must satisfy lo < hi");
}

}  // namespace

Raster generate_scene(const SceneSpec& spec) {
  validate_spec(spec);
  Lcg64 rng(spec.seed);
  const int side = spec.side;
  const int bands = spec.bands;
  const double lo = spec.value_range.first;
  const double hi = spec.value_range.second;
  const double span = hi - lo;
  const std::size_t plane = std::size_t(side) * side;

  std::vector<double> samples(plane * bands);

  // Background: per band a mid-range base level with a hairline strictly
  // monotone tilt, even bands tilted along x, odd bands along y. The tilt is
  // deliberately tiny so the spectrum is carried by the point features below,
  // not by a large-scale gradient that would mask them.
  for (int b = 0; b < bands; ++b) {
    const double base = lo + span * (0.35 + 0.30 * rng.next_double());
    const double rise = span * 1e-4 * (0.5 + 0.5 * rng.next_double());
    const bool along_x = (b % 2) == 0;
    for (int y = 0; y < side; ++y)
      for (int x = 0; x < side; ++x) {
        const double t = double(along_x ? x : y) / double(side - 1);
        samples[(std::size_t(b) * side + y) * side + x] =
            base + rise * (t - 0.5);
      }
  }

  // Additive near-point Gaussian blobs with a signed per-band amplitude
  // each. Sub-pixel sigma keeps them sharp, so degrading the scene visibly
  // costs resolution — the property the evaluation metrics probe.
  for (int i = 0; i < spec.n_blobs; ++i) {
    const double cx = rng.next_double() * (side - 1);
    const double cy = rng.next_double() * (side - 1);
    const double sigma = 0.50 + 0.25 * rng.next_double();
    std::vector<double> amp(bands);
    for (int b = 0; b < bands; ++b)
      amp[b] = span * (0.6 * rng.next_double() - 0.3);
    const double inv = 1.0 / (2.0 * sigma * sigma);
    for (int y = 0; y < side; ++y)
      for (int x = 0; x < side; ++x) {
        const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        const double g = std::exp(-d2 * inv);
        for (int b = 0; b < bands; ++b)
          samples[(std::size_t(b) * side + y) * side + x] += amp[b] * g;
      }
  }

  // Hard-edged shapes a few pixels across overwrite whatever lies
  // underneath, adding broadband edge content.
  for (int i = 0; i < spec.n_shapes; ++i) {
    const bool rect = rng.next_double() < 0.5;
    const double cx = rng.next_double() * (side - 1);
    const double cy = rng.next_double() * (side - 1);
    double sx = 0.0, sy = 0.0, radius2 = 0.0;
    if (rect) {
      sx = 0.8 + 1.4 * rng.next_double();
      sy = 0.8 + 1.4 * rng.next_double();
    } else {
      const double r = 0.8 + 1.4 * rng.next_double();
      radius2 = r * r;
    }
    std::vector<double> value(bands);
    for (int b = 0; b < bands; ++b)
      value[b] = lo + span * rng.next_double();
    for (int y = 0; y < side; ++y)
      for (int x = 0; x < side; ++x) {
        const bool inside =
            rect ? (std::abs(x - cx) <= sx && std::abs(y - cy) <= sy)
                 : ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= radius2);
        if (!inside) continue;
        for (int b = 0; b < bands; ++b)
          samples[(std::size_t(b) * side + y) * side + x] = value[b];
      }
  }

  for (double& v : samples) v = std::clamp(v, lo, hi);

  Raster r = make_raster(side, side, bands, std::move(samples));
  r.nominal_range = spec.value_range;
  return r;
}

Raster simulate_pan(const Raster& gt, const std::vector<double>& weights) {
  if (int(weights.size()) != gt.bands)
    fail(ErrorCode::invalid_argument,
         "expected " + std::to_string(gt.bands) + " pan weights, got " +
             std::to_string(weights.size()));
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0)
      fail(ErrorCode::invalid_argument, "pan weights must be nonnegative");
    sum += w;
  }
  if (sum <= 0.0)
    fail(ErrorCode::invalid_argument, "pan weights must sum to > 0");

  const std::size_t plane = gt.pixel_count();
  std::vector<double> out(plane, 0.0);
  for (int b = 0; b < gt.bands; ++b) {
    const double w = weights[b] / sum;
    for (std::size_t i = 0; i < plane; ++i)
      out[i] += w * gt.samples[std::size_t(b) * plane + i];
  }
  Raster r = make_raster(gt.width, gt.height, 1, std::move(out));
  r.nominal_range = gt.nominal_range;
  return r;
}

Raster wald_degrade(const Raster& gt, int ratio) {
  if (ratio < 2)
    fail(ErrorCode::invalid_argument, "degrade ratio must be >= 2");
  if (gt.width % ratio != 0 || gt.height % ratio != 0)
    fail(ErrorCode::invalid_argument,
         "dims " + std::to_string(gt.width) + "x" + std::to_string(gt.height) +
             " not divisible by ratio " + std::to_string(ratio));
  return detail::degrade_to_grid(gt, ratio);
}

WaldTriple make_wald_triple(const SceneSpec& spec, int ratio,
                            const std::vector<double>& pan_weights) {
  WaldTriple t;
  t.ground_truth = generate_scene(spec);
  const std::vector<double> w =
      pan_weights.empty()
          ? std::vector<double>(spec.bands, 1.0 / double(spec.bands))
          : pan_weights;
  t.pan = simulate_pan(t.ground_truth, w);
  t.ms_low = wald_degrade(t.ground_truth, ratio);
  t.ratio = ratio;
  return t;
}

}  // namespace panfuse
