#include "imageops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "panfuse/errors.hpp"

namespace panfuse::detail {

double mean_of(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return v.empty() ? 0.0 : sum / double(v.size());
}

double stddev_of(std::span<const double> v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) {
    const double d = x - mean;
    ss += d * d;
  }
  return std::sqrt(ss / double(v.size() - 1));
}

double pearson(std::span<const double> a, std::span<const double> b,
               bool* degenerate) {
  const double ma = mean_of(a);
  const double mb = mean_of(b);
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  const double denom = std::sqrt(saa) * std::sqrt(sbb);
  if (denom < 1e-24 || a.size() < 2) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  if (degenerate) *degenerate = false;
  return sab / denom;
}

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = std::max(1, int(std::floor(3.0 * sigma)));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = std::exp(-(double(i) * i) / (2.0 * sigma * sigma));
    k[i + radius] = w;
    sum += w;
  }
  for (double& w : k) w /= sum;
  return k;
}

std::vector<double> convolve_separable(const std::vector<double>& band,
                                       int width, int height,
                                       const std::vector<double>& kernel) {
  const int radius = int(kernel.size() / 2);
  std::vector<double> tmp(band.size());
  std::vector<double> out(band.size());
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int xs = std::clamp(x + i, 0, width - 1);
        acc += kernel[i + radius] * band[std::size_t(y) * width + xs];
      }
      tmp[std::size_t(y) * width + x] = acc;
    }
  }
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int ys = std::clamp(y + i, 0, height - 1);
        acc += kernel[i + radius] * tmp[std::size_t(ys) * width + x];
      }
      out[std::size_t(y) * width + x] = acc;
    }
  }
  return out;
}

Raster degrade_to_grid(const Raster& r, int ratio) {
  if (ratio < 1) fail(ErrorCode::invalid_argument, "ratio must be >= 1");
  if (ratio == 1) return r;
  const int out_w = r.width / ratio;
  const int out_h = r.height / ratio;
  const int offset = (ratio - 1) / 2;
  const auto kernel = gaussian_kernel(double(ratio) / 2.0);
  std::vector<double> out(std::size_t(out_w) * out_h * r.bands);
  parallel_for(r.bands, [&](int b) {
    const auto band = r.band(b);
    const auto blurred = convolve_separable(
        std::vector<double>(band.begin(), band.end()), r.width, r.height,
        kernel);
    for (int y = 0; y < out_h; ++y)
      for (int x = 0; x < out_w; ++x)
        out[(std::size_t(b) * out_h + y) * out_w + x] =
            blurred[std::size_t(y * ratio + offset) * r.width +
                    (x * ratio + offset)];
  });
  return make_raster_like(r, out_w, out_h, r.bands, std::move(out));
}

std::vector<double> sobel_magnitude(const Raster& img) {
  const int w = img.width;
  const int h = img.height;
  std::vector<double> mag(std::size_t(w - 2) * (h - 2));
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      const double tl = img.at(x - 1, y - 1, 0), tc = img.at(x, y - 1, 0),
                   tr = img.at(x + 1, y - 1, 0);
      const double ml = img.at(x - 1, y, 0), mr = img.at(x + 1, y, 0);
      const double bl = img.at(x - 1, y + 1, 0), bc = img.at(x, y + 1, 0),
                   br = img.at(x + 1, y + 1, 0);
      const double gx = (tr + 2.0 * mr + br) - (tl + 2.0 * ml + bl);
      const double gy = (bl + 2.0 * bc + br) - (tl + 2.0 * tc + tr);
      mag[std::size_t(y - 1) * (w - 2) + (x - 1)] =
          std::sqrt(gx * gx + gy * gy);
    }
  }
  return mag;
}

int thread_cap() {
  if (const char* env = std::getenv("PANFUSE_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : int(hw);
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  const int workers = std::min(n, thread_cap());
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      for (int i = t; i < n; i += workers) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace panfuse::detail
