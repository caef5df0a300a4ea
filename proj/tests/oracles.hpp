#pragma once

// Independent reference implementations used to cross-check the library.
// Everything here is written as plain scalar loops sharing no code with
// src/, so a defect would have to be introduced twice, identically, to
// slip through. Oracles operate on flat vectors plus dimensions; tests
// adapt library types at the call site.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

namespace oracle {

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

inline double stddev_n1(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / double(v.size() - 1));
}

inline double pearson(const std::vector<double>& x,
                      const std::vector<double>& y) {
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// --- Fusion ----------------------------------------------------------------

// F = M * P / mean(P), written with the same sequential mean so the
// comparison can be exact to the last bit.
inline std::vector<double> brovey(const std::vector<double>& ms,
                                  const std::vector<double>& pan, int bands) {
  const std::size_t plane = pan.size();
  double pm = 0.0;
  for (double v : pan) pm += v;
  pm /= double(plane);
  std::vector<double> out(ms.size());
  for (int b = 0; b < bands; ++b)
    for (std::size_t i = 0; i < plane; ++i)
      out[b * plane + i] = ms[b * plane + i] * pan[i] / pm;
  return out;
}

// Closed-form eigendecomposition of a symmetric 2x2 matrix [[a,b],[b,c]].
// Returns eigenvalues descending plus the unit eigenvector of the larger.
struct Eig2 {
  double l1 = 0.0, l2 = 0.0;
  double v1x = 0.0, v1y = 0.0;
};

inline Eig2 eig2x2(double a, double b, double c) {
  Eig2 e;
  const double tr = a + c;
  const double disc = std::sqrt((a - c) * (a - c) + 4.0 * b * b);
  e.l1 = (tr + disc) / 2.0;
  e.l2 = (tr - disc) / 2.0;
  double vx, vy;
  if (std::abs(b) > 1e-300) {
    vx = b;
    vy = e.l1 - a;
  } else {
    vx = a >= c ? 1.0 : 0.0;
    vy = a >= c ? 0.0 : 1.0;
  }
  const double n = std::sqrt(vx * vx + vy * vy);
  e.v1x = vx / n;
  e.v1y = vy / n;
  return e;
}

// Single orthonormal 2x2 Haar step on one block [[a,b],[c,d]].
struct HaarBlock {
  double ll, lh, hl, hh;
};

inline HaarBlock haar(double a, double b, double c, double d) {
  return {(a + b + c + d) / 2.0, (a - b + c - d) / 2.0, (a + b - c - d) / 2.0,
          (a - b - c + d) / 2.0};
}

// --- Spectral metrics ------------------------------------------------------

inline double sam(const std::vector<double>& f, const std::vector<double>& r,
                  int bands) {
  const std::size_t plane = f.size() / bands;
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t p = 0; p < plane; ++p) {
    double dot = 0.0, nf = 0.0, nr = 0.0;
    for (int b = 0; b < bands; ++b) {
      dot += f[b * plane + p] * r[b * plane + p];
      nf += f[b * plane + p] * f[b * plane + p];
      nr += r[b * plane + p] * r[b * plane + p];
    }
    nf = std::sqrt(nf);
    nr = std::sqrt(nr);
    if (nf < 1e-12 || nr < 1e-12) continue;
    double cosv = dot / (nf * nr);
    cosv = std::max(-1.0, std::min(1.0, cosv));
    sum += std::acos(cosv);
    ++used;
  }
  return sum / double(used);
}

inline double sid(const std::vector<double>& f, const std::vector<double>& r,
                  int bands, double eps = 1e-12) {
  const std::size_t plane = f.size() / bands;
  double gmin = 0.0;
  for (double v : f) gmin = std::min(gmin, v);
  for (double v : r) gmin = std::min(gmin, v);
  const double shift = gmin < 0.0 ? -gmin : 0.0;
  double sum = 0.0;
  for (std::size_t px = 0; px < plane; ++px) {
    std::vector<double> p(bands), q(bands);
    double ps = 0.0, qs = 0.0;
    for (int b = 0; b < bands; ++b) {
      p[b] = std::max(f[b * plane + px] + shift, eps);
      q[b] = std::max(r[b * plane + px] + shift, eps);
      ps += p[b];
      qs += q[b];
    }
    double d = 0.0;
    for (int b = 0; b < bands; ++b) {
      const double pi = p[b] / ps, qi = q[b] / qs;
      d += pi * std::log(pi / qi) + qi * std::log(qi / pi);
    }
    sum += d;
  }
  return sum / double(plane);
}

// Gaussian blur (radius max(1, floor(3*sigma)), normalized, edges
// replicated) done as one direct 2-D convolution, then decimation keeping
// sample (x*r + (r-1)/2, y*r + (r-1)/2).
inline std::vector<double> degrade(const std::vector<double>& band, int w,
                                   int h, int ratio) {
  const double sigma = double(ratio) / 2.0;
  const int radius = std::max(1, int(std::floor(3.0 * sigma)));
  std::vector<double> k(2 * radius + 1);
  double ks = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-double(i) * i / (2.0 * sigma * sigma));
    ks += k[i + radius];
  }
  for (double& v : k) v /= ks;
  const int ow = w / ratio, oh = h / ratio, off = (ratio - 1) / 2;
  std::vector<double> out(std::size_t(ow) * oh);
  for (int oy = 0; oy < oh; ++oy)
    for (int ox = 0; ox < ow; ++ox) {
      const int cx = ox * ratio + off, cy = oy * ratio + off;
      double acc = 0.0;
      for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx) {
          const int sx = std::clamp(cx + dx, 0, w - 1);
          const int sy = std::clamp(cy + dy, 0, h - 1);
          acc += k[dx + radius] * k[dy + radius] *
                 band[std::size_t(sy) * w + sx];
        }
      out[std::size_t(oy) * ow + ox] = acc;
    }
  return out;
}

inline double scp(const std::vector<double>& fused,
                  const std::vector<double>& ms_low, int w, int h, int bands,
                  int ratio) {
  const std::size_t fp = std::size_t(w) * h;
  const std::size_t lp = fp / (std::size_t(ratio) * ratio);
  double sum = 0.0;
  int used = 0;
  for (int b = 0; b < bands; ++b) {
    std::vector<double> fb(fused.begin() + b * fp, fused.begin() + (b + 1) * fp);
    std::vector<double> deg =
        ratio == 1 ? fb : degrade(fb, w, h, ratio);
    std::vector<double> mb(ms_low.begin() + b * lp,
                           ms_low.begin() + (b + 1) * lp);
    const double sd = stddev_n1(deg), sm = stddev_n1(mb);
    if (sd < 1e-12 || sm < 1e-12) continue;
    sum += pearson(deg, mb);
    ++used;
  }
  return sum / double(used);
}

// --- Spatial metrics -------------------------------------------------------

inline double ssim(const std::vector<double>& a, const std::vector<double>& b,
                   int w, int h, double range, int win = 11,
                   double sigma = 1.5, double k1 = 0.01, double k2 = 0.03) {
  std::vector<double> g(std::size_t(win) * win);
  const int half = win / 2;
  double gs = 0.0;
  for (int y = 0; y < win; ++y)
    for (int x = 0; x < win; ++x) {
      const double d2 = double(x - half) * (x - half) +
                        double(y - half) * (y - half);
      g[std::size_t(y) * win + x] = std::exp(-d2 / (2.0 * sigma * sigma));
      gs += g[std::size_t(y) * win + x];
    }
  for (double& v : g) v /= gs;
  const double c1 = (k1 * range) * (k1 * range);
  const double c2 = (k2 * range) * (k2 * range);
  double sum = 0.0;
  int count = 0;
  for (int y0 = 0; y0 + win <= h; ++y0)
    for (int x0 = 0; x0 + win <= w; ++x0) {
      double ma = 0.0, mb = 0.0;
      for (int y = 0; y < win; ++y)
        for (int x = 0; x < win; ++x) {
          const double wgt = g[std::size_t(y) * win + x];
          ma += wgt * a[std::size_t(y0 + y) * w + (x0 + x)];
          mb += wgt * b[std::size_t(y0 + y) * w + (x0 + x)];
        }
      double va = 0.0, vb = 0.0, cov = 0.0;
      for (int y = 0; y < win; ++y)
        for (int x = 0; x < win; ++x) {
          const double wgt = g[std::size_t(y) * win + x];
          const double da = a[std::size_t(y0 + y) * w + (x0 + x)] - ma;
          const double db = b[std::size_t(y0 + y) * w + (x0 + x)] - mb;
          va += wgt * da * da;
          vb += wgt * db * db;
          cov += wgt * da * db;
        }
      const double num = (2.0 * ma * mb + c1) * (2.0 * cov + c2);
      const double den = (ma * ma + mb * mb + c1) * (va + vb + c2);
      sum += num / den;
      ++count;
    }
  return sum / double(count);
}

inline std::vector<double> sobel_mag(const std::vector<double>& img, int w,
                                     int h) {
  std::vector<double> mag(std::size_t(w - 2) * (h - 2));
  for (int y = 1; y < h - 1; ++y)
    for (int x = 1; x < w - 1; ++x) {
      auto at = [&](int xx, int yy) { return img[std::size_t(yy) * w + xx]; };
      const double gx = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) +
                         at(x + 1, y + 1)) -
                        (at(x - 1, y - 1) + 2.0 * at(x - 1, y) +
                         at(x - 1, y + 1));
      const double gy = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) +
                         at(x + 1, y + 1)) -
                        (at(x - 1, y - 1) + 2.0 * at(x, y - 1) +
                         at(x + 1, y - 1));
      mag[std::size_t(y - 1) * (w - 2) + (x - 1)] =
          std::sqrt(gx * gx + gy * gy);
    }
  return mag;
}

inline double edge(const std::vector<double>& a, const std::vector<double>& b,
                   int w, int h) {
  return pearson(sobel_mag(a, w, h), sobel_mag(b, w, h));
}

inline double rmse(const std::vector<double>& a,
                   const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / double(a.size()));
}

inline double psnr(const std::vector<double>& a, const std::vector<double>& b,
                   double range) {
  const double e = rmse(a, b);
  if (e == 0.0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(range / e);
}

// Half-power frequency of the radially averaged power spectrum, computed
// with a naive separable DFT: mean removed, Hann window, power binned by
// rounded radius, normalized by bin 1, 3-bin moving average, first
// interpolated crossing of 0.5.
inline double mtf50(const std::vector<double>& img, int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i)
    w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / (n - 1)));
  double m = 0.0;
  for (double v : img) m += v;
  m /= double(img.size());
  std::vector<double> g(img.size());
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      g[std::size_t(y) * n + x] = (img[std::size_t(y) * n + x] - m) * w[x] * w[y];
  std::vector<std::complex<double>> rows(g.size()), full(g.size());
  for (int y = 0; y < n; ++y)
    for (int u = 0; u < n; ++u) {
      std::complex<double> acc = 0.0;
      for (int x = 0; x < n; ++x)
        acc += g[std::size_t(y) * n + x] *
               std::polar(1.0, -2.0 * std::numbers::pi * u * x / n);
      rows[std::size_t(y) * n + u] = acc;
    }
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      std::complex<double> acc = 0.0;
      for (int y = 0; y < n; ++y)
        acc += rows[std::size_t(y) * n + u] *
               std::polar(1.0, -2.0 * std::numbers::pi * v * y / n);
      full[std::size_t(v) * n + u] = acc;
    }
  const int kmax = n / 2;
  std::vector<double> p(kmax + 1, 0.0);
  std::vector<int> cnt(kmax + 1, 0);
  for (int v = 0; v < n; ++v)
    for (int u = 0; u < n; ++u) {
      const int su = u <= n / 2 ? u : u - n;
      const int sv = v <= n / 2 ? v : v - n;
      const int k = int(std::llround(std::sqrt(double(su) * su + double(sv) * sv)));
      if (k > kmax) continue;
      p[k] += std::norm(full[std::size_t(v) * n + u]);
      cnt[k]++;
    }
  for (int k = 0; k <= kmax; ++k)
    if (cnt[k] > 0) p[k] /= double(cnt[k]);
  if (p[1] <= 0.0) return 0.0;
  std::vector<double> s(kmax + 1);
  for (int k = 0; k <= kmax; ++k) s[k] = p[k] / p[1];
  std::vector<double> sm(kmax + 1, 0.0);
  for (int k = 1; k <= kmax; ++k) {
    const int a = std::max(1, k - 1), b = std::min(kmax, k + 1);
    double acc = 0.0;
    for (int j = a; j <= b; ++j) acc += s[j];
    sm[k] = acc / double(b - a + 1);
  }
  for (int k = 2; k <= kmax; ++k)
    if (sm[k] < 0.5 && sm[k - 1] >= 0.5) {
      const double t = (sm[k - 1] - 0.5) / (sm[k - 1] - sm[k]);
      return (double(k - 1) + t) / double(n);
    }
  return 0.5;
}

// --- Preprocess helpers ----------------------------------------------------

// Nearest-rank lower quantile over a copy of the data.
inline double quantile_nearest_rank(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  if (p <= 0.0) return v.front();
  const std::size_t rank = std::size_t(std::ceil(p * double(v.size())));
  return v[std::max<std::size_t>(rank, 1) - 1];
}

// Brute-force NCC translation search with the library's tie-breaking:
// smallest |dx|+|dy|, then smallest dy, then smallest dx.
struct ShiftResult {
  int dx = 0, dy = 0;
  double score = -2.0;
};

inline double ncc_at(const std::vector<double>& ref,
                     const std::vector<double>& mov, int w, int h, int dx,
                     int dy) {
  std::vector<double> a, b;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int mx = x - dx, my = y - dy;
      if (mx < 0 || mx >= w || my < 0 || my >= h) continue;
      a.push_back(ref[std::size_t(y) * w + x]);
      b.push_back(mov[std::size_t(my) * w + mx]);
    }
  const double ma = mean(a), mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return -2.0;
  return sab / std::sqrt(saa * sbb);
}

inline ShiftResult best_shift(const std::vector<double>& ref,
                              const std::vector<double>& mov, int w, int h,
                              int max_shift) {
  ShiftResult best;
  for (int dy = -max_shift; dy <= max_shift; ++dy)
    for (int dx = -max_shift; dx <= max_shift; ++dx) {
      const double s = ncc_at(ref, mov, w, h, dx, dy);
      const bool better =
          s > best.score + 1e-15 ||
          (std::abs(s - best.score) <= 1e-15 &&
           (std::abs(dx) + std::abs(dy) <
                std::abs(best.dx) + std::abs(best.dy) ||
            (std::abs(dx) + std::abs(dy) ==
                 std::abs(best.dx) + std::abs(best.dy) &&
             (dy < best.dy || (dy == best.dy && dx < best.dx)))));
      if (better) best = {dx, dy, s};
    }
  return best;
}

// --- Deterministic random helpers -----------------------------------------

// Same MMIX constants as the library generator; reimplemented here so the
// tests do not depend on library code for their own inputs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  double uniform() {
    state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
    return double(state_ >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; consumes two uniforms per pair of calls.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::vector<double> uniform_vector(std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (double& x : v) x = uniform(lo, hi);
    return v;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace oracle
