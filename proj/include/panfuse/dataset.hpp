#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "panfuse/raster.hpp"

namespace panfuse {

/// Procedural ground-truth scene: per-band ramps, Gaussian blobs and
/// hard-edged shapes, every parameter drawn from one seeded generator.
struct SceneSpec {
  int side = 128;  // power of two, >= 32
  int bands = 4;
  int n_blobs = 12;
  int n_shapes = 6;
  std::uint64_t seed = 0;
  std::pair<double, double> value_range{0.0, 255.0};
};

struct WaldTriple {
  Raster ground_truth;  // high-res MS
  Raster ms_low;        // ground truth degraded by ratio
  Raster pan;           // 1 band, simulated from ground truth
  int ratio = 1;
};

/// Deterministic 64-bit LCG (Knuth MMIX constants), top 53 bits to double.
/// Fully specified so datasets are bit-identical across builds.
class Lcg64 {
 public:
  explicit Lcg64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
    return state_;
  }

  double next_double() {  // [0, 1)
    return double(next() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

Raster generate_scene(const SceneSpec& spec);

/// Weighted band sum; weights are renormalized to sum 1.
Raster simulate_pan(const Raster& gt, const std::vector<double>& weights);

/// Gaussian blur (sigma = ratio/2, truncated at 3*sigma) then pixel-center
/// decimation. Dims must divide by ratio; ratio >= 2.
Raster wald_degrade(const Raster& gt, int ratio);

/// Empty pan_weights means equal weight per band.
WaldTriple make_wald_triple(const SceneSpec& spec, int ratio,
                            const std::vector<double>& pan_weights = {});

}  // namespace panfuse
