#pragma once

// Internal helpers shared by preprocess, fusion, metrics and dataset.
// Statistics accumulate in sequential order; that order is the reference
// the concurrency contract is defined against.

#include <functional>
#include <span>
#include <vector>

#include "panfuse/raster.hpp"

namespace panfuse::detail {

double mean_of(std::span<const double> v);
/// Sample standard deviation, n-1 divisor; 0 for fewer than two samples.
double stddev_of(std::span<const double> v, double mean);
/// Pearson correlation; *degenerate set when either side is constant.
double pearson(std::span<const double> a, std::span<const double> b,
               bool* degenerate);

/// Normalized 1-D Gaussian taps within +-3*sigma (radius floor(3*sigma),
/// at least 1).
std::vector<double> gaussian_kernel(double sigma);

/// Separable convolution of one band, edge-replicated borders,
/// horizontal pass then vertical pass.
std::vector<double> convolve_separable(const std::vector<double>& band,
                                       int width, int height,
                                       const std::vector<double>& kernel);

/// Blur every band with sigma = ratio/2, then keep samples at offset
/// (ratio-1)/2 on a stride-`ratio` grid. Identity for ratio 1.
Raster degrade_to_grid(const Raster& r, int ratio);

/// 3x3 Sobel gradient magnitude of a single-band raster; returns the
/// (w-2) x (h-2) interior map.
std::vector<double> sobel_magnitude(const Raster& img);

/// Runs fn(i) for i in [0, n). Splits across threads when the cap allows;
/// iterations must be independent. PANFUSE_THREADS caps the worker count.
void parallel_for(int n, const std::function<void(int)>& fn);

int thread_cap();

}  // namespace panfuse::detail
