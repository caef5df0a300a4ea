#include "panfuse/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "imageops.hpp"
#include "panfuse/errors.hpp"

namespace panfuse {

namespace {

constexpr double kStdFloor = 1e-12;

void check_variance(const Raster& pan, const char* op) {
  const double m = detail::mean_of(pan.samples);
  if (detail::stddev_of(pan.samples, m) < kStdFloor)
    fail(ErrorCode::degenerate_input,
         std::string(op) + ": panchromatic image has zero variance");
}

int default_wavelet_levels(int ratio) {
  int levels = int(std::ceil(std::log2(double(ratio))));
  return std::max(1, levels);
}

}  // namespace

FusionInputs make_fusion_inputs(Raster ms, Raster pan, int ratio) {
  if (pan.bands != 1)
    fail(ErrorCode::invalid_argument, "pan raster must have exactly 1 band");
  if (ms.width != pan.width || ms.height != pan.height)
    fail(ErrorCode::invalid_argument,
         "ms and pan must share the pan grid (" + std::to_string(ms.width) +
             "x" + std::to_string(ms.height) + " vs " +
             std::to_string(pan.width) + "x" + std::to_string(pan.height) + ")");
  if (ratio < 1) fail(ErrorCode::invalid_argument, "ratio must be >= 1");
  return FusionInputs{std::move(ms), std::move(pan), ratio};
}

// --- Brovey ----------------------------------------------------------------

Raster fuse_brovey(const FusionInputs& in) {
  const double pan_mean = detail::mean_of(in.pan.samples);
  if (pan_mean == 0.0)
    fail(ErrorCode::degenerate_input, "brovey: mean of pan image is zero");
  const std::size_t plane = in.ms.pixel_count();
  std::vector<double> out(in.ms.sample_count());
  for (int b = 0; b < in.ms.bands; ++b)
    for (std::size_t i = 0; i < plane; ++i)
      out[b * plane + i] = in.ms.samples[b * plane + i] * in.pan.samples[i] / pan_mean;
  return make_raster_like(in.ms, in.ms.width, in.ms.height, in.ms.bands,
                          std::move(out));
}

// --- IHS -------------------------------------------------------------------

Raster fuse_ihs(const FusionInputs& in, bool match) {
  if (in.ms.bands != 3)
    fail(ErrorCode::unsupported,
         "ihs: unsupported band count (need 3, got " +
             std::to_string(in.ms.bands) + ")");
  const Raster intensity = to_intensity(in.ms);
  Raster pan_adj = in.pan;
  if (match) {
    check_variance(in.pan, "ihs");
    pan_adj = match_moments(in.pan, intensity);
  }
  const std::size_t plane = in.ms.pixel_count();
  std::vector<double> out(in.ms.sample_count());
  // Replacing I and inverting the transform reduces to adding the intensity
  // delta to every band; hue and saturation never get touched numerically.
  for (int b = 0; b < 3; ++b)
    for (std::size_t i = 0; i < plane; ++i)
      out[b * plane + i] = in.ms.samples[b * plane + i] +
                           (pan_adj.samples[i] - intensity.samples[i]);
  return make_raster_like(in.ms, in.ms.width, in.ms.height, 3, std::move(out));
}

// --- PCA -------------------------------------------------------------------

namespace {

// Eigenvector matrix entry (row i, column col) of a b x b row-major matrix.
inline double v_at(const std::vector<double>& v, int i, int col, int b) {
  return v[std::size_t(i) * b + col];
}

// Cyclic Jacobi eigendecomposition of a symmetric matrix. a is row-major
// b x b and gets destroyed; v receives eigenvectors as columns.
void jacobi_eigen(std::vector<double>& a, std::vector<double>& v, int b) {
  v.assign(std::size_t(b) * b, 0.0);
  for (int i = 0; i < b; ++i) v[std::size_t(i) * b + i] = 1.0;

  double trace = 0.0;
  for (int i = 0; i < b; ++i) trace += a[std::size_t(i) * b + i];
  const double threshold = 1e-12 * trace;

  auto off_norm = [&] {
    double s = 0.0;
    for (int p = 0; p < b; ++p)
      for (int q = p + 1; q < b; ++q) {
        const double x = a[std::size_t(p) * b + q];
        s += 2.0 * x * x;
      }
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < 100; ++sweep) {
    if (off_norm() <= threshold) return;
    for (int p = 0; p < b; ++p) {
      for (int q = p + 1; q < b; ++q) {
        const double apq = a[std::size_t(p) * b + q];
        if (apq == 0.0) continue;
        const double app = a[std::size_t(p) * b + p];
        const double aqq = a[std::size_t(q) * b + q];
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int k = 0; k < b; ++k) {
          const double akp = a[std::size_t(k) * b + p];
          const double akq = a[std::size_t(k) * b + q];
          a[std::size_t(k) * b + p] = c * akp - s * akq;
          a[std::size_t(k) * b + q] = s * akp + c * akq;
        }
        for (int k = 0; k < b; ++k) {
          const double apk = a[std::size_t(p) * b + k];
          const double aqk = a[std::size_t(q) * b + k];
          a[std::size_t(p) * b + k] = c * apk - s * aqk;
          a[std::size_t(q) * b + k] = s * apk + c * aqk;
        }
        for (int k = 0; k < b; ++k) {
          const double vkp = v[std::size_t(k) * b + p];
          const double vkq = v[std::size_t(k) * b + q];
          v[std::size_t(k) * b + p] = c * vkp - s * vkq;
          v[std::size_t(k) * b + q] = s * vkp + c * vkq;
        }
      }
    }
  }
  if (off_norm() > threshold)
    fail(ErrorCode::numeric, "pca: eigensolve did not converge in 100 sweeps");
}

}  // namespace

PcaModel fit_pca(const Raster& ms) {
  const int b = ms.bands;
  if (b < 2) fail(ErrorCode::invalid_argument, "pca needs at least 2 bands");
  const std::size_t n = ms.pixel_count();
  if (n < std::size_t(b) + 1)
    fail(ErrorCode::insufficient_data,
         "pca needs at least bands+1 pixels (bands=" + std::to_string(b) +
             ", pixels=" + std::to_string(n) + ")");

  PcaModel model;
  model.bands = b;
  model.mean.resize(b);
  for (int i = 0; i < b; ++i) model.mean[i] = detail::mean_of(ms.band(i));

  // band covariance, n-1 divisor, sequential accumulation
  std::vector<double> cov(std::size_t(b) * b, 0.0);
  for (std::size_t p = 0; p < n; ++p)
    for (int i = 0; i < b; ++i) {
      const double di = ms.samples[std::size_t(i) * n + p] - model.mean[i];
      for (int j = i; j < b; ++j) {
        const double dj = ms.samples[std::size_t(j) * n + p] - model.mean[j];
        cov[std::size_t(i) * b + j] += di * dj;
      }
    }
  for (int i = 0; i < b; ++i)
    for (int j = i; j < b; ++j) {
      cov[std::size_t(i) * b + j] /= double(n - 1);
      cov[std::size_t(j) * b + i] = cov[std::size_t(i) * b + j];
    }

  std::vector<double> vecs;
  jacobi_eigen(cov, vecs, b);

  std::vector<int> order(b);
  for (int i = 0; i < b; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return cov[std::size_t(x) * b + x] > cov[std::size_t(y) * b + y];
  });

  model.eigenvalues.resize(b);
  model.components.assign(std::size_t(b) * b, 0.0);
  for (int k = 0; k < b; ++k) {
    const int col = order[k];
    model.eigenvalues[k] = std::max(0.0, cov[std::size_t(col) * b + col]);
    // sign convention: largest-magnitude entry positive, first index on ties
    int arg = 0;
    double best = -1.0;
    for (int i = 0; i < b; ++i) {
      const double mag = std::abs(v_at(vecs, i, col, b));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    const double sign = v_at(vecs, arg, col, b) < 0.0 ? -1.0 : 1.0;
    for (int i = 0; i < b; ++i)
      model.components[std::size_t(k) * b + i] = sign * v_at(vecs, i, col, b);
  }
  return model;
}

Raster pca_forward(const Raster& ms, const PcaModel& model) {
  const int b = model.bands;
  if (ms.bands != b)
    fail(ErrorCode::invalid_argument, "pca model band count mismatch");
  const std::size_t n = ms.pixel_count();
  std::vector<double> out(ms.sample_count());
  for (std::size_t p = 0; p < n; ++p)
    for (int k = 0; k < b; ++k) {
      double score = 0.0;
      for (int i = 0; i < b; ++i)
        score += model.components[std::size_t(k) * b + i] *
                 (ms.samples[std::size_t(i) * n + p] - model.mean[i]);
      out[std::size_t(k) * n + p] = score;
    }
  Raster r = make_raster(ms.width, ms.height, b, std::move(out));
  r.nominal_range = ms.nominal_range;
  return r;
}

Raster pca_inverse(const Raster& scores, const PcaModel& model) {
  const int b = model.bands;
  if (scores.bands != b)
    fail(ErrorCode::invalid_argument, "pca model band count mismatch");
  const std::size_t n = scores.pixel_count();
  std::vector<double> out(scores.sample_count());
  for (std::size_t p = 0; p < n; ++p)
    for (int i = 0; i < b; ++i) {
      double v = model.mean[i];
      for (int k = 0; k < b; ++k)
        v += scores.samples[std::size_t(k) * n + p] *
             model.components[std::size_t(k) * b + i];
      out[std::size_t(i) * n + p] = v;
    }
  Raster r = make_raster(scores.width, scores.height, b, std::move(out));
  r.nominal_range = scores.nominal_range;
  return r;
}

Raster fuse_pca(const FusionInputs& in, PcaMode mode, bool match) {
  const PcaModel model = fit_pca(in.ms);
  Raster scores = pca_forward(in.ms, model);
  const std::size_t plane = in.ms.pixel_count();

  if (mode == PcaMode::paper_literal) {
    // F = M_PCA + P, broadcast over every score plane, as printed.
    std::vector<double> out(scores.samples);
    for (int b = 0; b < in.ms.bands; ++b)
      for (std::size_t i = 0; i < plane; ++i)
        out[b * plane + i] += in.pan.samples[i];
    return make_raster_like(in.ms, in.ms.width, in.ms.height, in.ms.bands,
                            std::move(out));
  }

  check_variance(in.pan, "pca");
  Raster replacement = in.pan;
  if (match) {
    const Raster first = make_raster(
        scores.width, scores.height, 1,
        std::vector<double>(scores.samples.begin(),
                            scores.samples.begin() + plane));
    replacement = match_moments(in.pan, first);
  }
  std::copy(replacement.samples.begin(), replacement.samples.end(),
            scores.samples.begin());
  Raster fused = pca_inverse(scores, model);
  return make_raster_like(in.ms, fused.width, fused.height, fused.bands,
                          std::move(fused.samples));
}

// --- Haar wavelet ----------------------------------------------------------

namespace {

// Pads the right column / bottom row by replication when dims are odd.
std::vector<double> pad_even(const std::vector<double>& band, int w, int h,
                             int pw, int ph) {
  std::vector<double> out(std::size_t(pw) * ph);
  for (int y = 0; y < ph; ++y) {
    const int sy = std::min(y, h - 1);
    for (int x = 0; x < pw; ++x)
      out[std::size_t(y) * pw + x] = band[std::size_t(sy) * w + std::min(x, w - 1)];
  }
  return out;
}

struct Subbands {
  std::vector<double> ll, lh, hl, hh;
  int w = 0, h = 0;  // subband dims
};

Subbands haar_forward(const std::vector<double>& band, int w, int h) {
  const int pw = w + (w & 1);
  const int ph = h + (h & 1);
  const std::vector<double>& src =
      (pw == w && ph == h) ? band : pad_even(band, w, h, pw, ph);
  Subbands sb;
  sb.w = pw / 2;
  sb.h = ph / 2;
  const std::size_t n = std::size_t(sb.w) * sb.h;
  sb.ll.resize(n);
  sb.lh.resize(n);
  sb.hl.resize(n);
  sb.hh.resize(n);
  for (int y = 0; y < sb.h; ++y)
    for (int x = 0; x < sb.w; ++x) {
      const double a = src[std::size_t(2 * y) * pw + 2 * x];
      const double b = src[std::size_t(2 * y) * pw + 2 * x + 1];
      const double c = src[std::size_t(2 * y + 1) * pw + 2 * x];
      const double d = src[std::size_t(2 * y + 1) * pw + 2 * x + 1];
      const std::size_t i = std::size_t(y) * sb.w + x;
      sb.ll[i] = (a + b + c + d) / 2.0;
      sb.lh[i] = (a - b + c - d) / 2.0;
      sb.hl[i] = (a + b - c - d) / 2.0;
      sb.hh[i] = (a - b - c + d) / 2.0;
    }
  return sb;
}

// Inverse of haar_forward up to the pad: returns the padded-even image,
// caller crops to (w, h).
std::vector<double> haar_inverse(const Subbands& sb, int w, int h) {
  const int pw = sb.w * 2;
  const int ph = sb.h * 2;
  std::vector<double> padded(std::size_t(pw) * ph);
  for (int y = 0; y < sb.h; ++y)
    for (int x = 0; x < sb.w; ++x) {
      const std::size_t i = std::size_t(y) * sb.w + x;
      const double ll = sb.ll[i], lh = sb.lh[i], hl = sb.hl[i], hh = sb.hh[i];
      padded[std::size_t(2 * y) * pw + 2 * x] = (ll + lh + hl + hh) / 2.0;
      padded[std::size_t(2 * y) * pw + 2 * x + 1] = (ll - lh + hl - hh) / 2.0;
      padded[std::size_t(2 * y + 1) * pw + 2 * x] = (ll + lh - hl - hh) / 2.0;
      padded[std::size_t(2 * y + 1) * pw + 2 * x + 1] = (ll - lh - hl + hh) / 2.0;
    }
  if (pw == w && ph == h) return padded;
  std::vector<double> out(std::size_t(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      out[std::size_t(y) * w + x] = padded[std::size_t(y) * pw + x];
  return out;
}

int max_levels(int w, int h) {
  return int(std::floor(std::log2(double(std::min(w, h)))));
}

}  // namespace

WaveletPyramid dwt2(const Raster& r, int levels) {
  if (levels < 1 || levels > max_levels(r.width, r.height))
    fail(ErrorCode::invalid_argument,
         "levels must lie in [1, " + std::to_string(max_levels(r.width, r.height)) +
             "] for a " + std::to_string(r.width) + "x" +
             std::to_string(r.height) + " raster (got " +
             std::to_string(levels) + ")");

  WaveletPyramid pyr;
  pyr.levels = levels;

  const int bands = r.bands;
  std::vector<std::vector<double>> current(bands);
  for (int b = 0; b < bands; ++b) {
    const auto span = r.band(b);
    current[b].assign(span.begin(), span.end());
  }
  int w = r.width, h = r.height;

  for (int level = 0; level < levels; ++level) {
    pyr.level_dims.emplace_back(w, h);
    const int sw = (w + 1) / 2, sh = (h + 1) / 2;
    const std::size_t n = std::size_t(sw) * sh;
    std::vector<double> lh(n * bands), hl(n * bands), hh(n * bands),
        ll(n * bands);
    detail::parallel_for(bands, [&](int b) {
      Subbands sb = haar_forward(current[b], w, h);
      std::copy(sb.ll.begin(), sb.ll.end(), ll.begin() + b * n);
      std::copy(sb.lh.begin(), sb.lh.end(), lh.begin() + b * n);
      std::copy(sb.hl.begin(), sb.hl.end(), hl.begin() + b * n);
      std::copy(sb.hh.begin(), sb.hh.end(), hh.begin() + b * n);
      current[b] = std::move(sb.ll);
    });
    WaveletPyramid::DetailSet ds;
    ds.lh = make_raster(sw, sh, bands, std::move(lh));
    ds.hl = make_raster(sw, sh, bands, std::move(hl));
    ds.hh = make_raster(sw, sh, bands, std::move(hh));
    pyr.details.push_back(std::move(ds));
    if (level == levels - 1) {
      pyr.approximation = make_raster(sw, sh, bands, std::move(ll));
      pyr.approximation.nominal_range = r.nominal_range;
    }
    w = sw;
    h = sh;
  }
  return pyr;
}

Raster idwt2(const WaveletPyramid& p) {
  if (p.levels < 1 || int(p.details.size()) != p.levels ||
      int(p.level_dims.size()) != p.levels)
    fail(ErrorCode::invalid_argument, "malformed wavelet pyramid");

  const int bands = p.approximation.bands;
  std::vector<std::vector<double>> current(bands);
  for (int b = 0; b < bands; ++b) {
    const auto span = p.approximation.band(b);
    current[b].assign(span.begin(), span.end());
  }

  for (int level = p.levels - 1; level >= 0; --level) {
    const auto [w, h] = p.level_dims[level];
    const auto& ds = p.details[level];
    std::vector<std::vector<double>> next(bands);
    detail::parallel_for(bands, [&](int b) {
      Subbands sb;
      sb.w = ds.lh.width;
      sb.h = ds.lh.height;
      sb.ll = std::move(current[b]);
      const auto lh = ds.lh.band(b), hl = ds.hl.band(b), hh = ds.hh.band(b);
      sb.lh.assign(lh.begin(), lh.end());
      sb.hl.assign(hl.begin(), hl.end());
      sb.hh.assign(hh.begin(), hh.end());
      next[b] = haar_inverse(sb, w, h);
    });
    current = std::move(next);
  }

  const auto [w, h] = p.level_dims[0];
  std::vector<double> out(std::size_t(w) * h * bands);
  for (int b = 0; b < bands; ++b)
    std::copy(current[b].begin(), current[b].end(),
              out.begin() + std::size_t(b) * w * h);
  Raster r = make_raster(w, h, bands, std::move(out));
  r.nominal_range = p.approximation.nominal_range;
  return r;
}

Raster fuse_wavelet(const FusionInputs& in, int levels, bool match) {
  if (levels == 0) levels = default_wavelet_levels(in.ratio);
  Raster pan_adj = in.pan;
  if (match) {
    check_variance(in.pan, "wavelet");
    pan_adj = match_moments(in.pan, to_intensity(in.ms));
  }

  const WaveletPyramid ms_pyr = dwt2(in.ms, levels);
  const WaveletPyramid pan_pyr = dwt2(pan_adj, levels);

  // MS approximation + pan details, the pan subbands replicated per band.
  auto replicate = [&](const Raster& sub) {
    std::vector<double> s;
    s.reserve(sub.pixel_count() * in.ms.bands);
    for (int b = 0; b < in.ms.bands; ++b)
      s.insert(s.end(), sub.samples.begin(), sub.samples.end());
    return make_raster(sub.width, sub.height, in.ms.bands, std::move(s));
  };

  WaveletPyramid fused;
  fused.levels = levels;
  fused.level_dims = ms_pyr.level_dims;
  fused.approximation = ms_pyr.approximation;
  for (const auto& ds : pan_pyr.details) {
    WaveletPyramid::DetailSet rep;
    rep.lh = replicate(ds.lh);
    rep.hl = replicate(ds.hl);
    rep.hh = replicate(ds.hh);
    fused.details.push_back(std::move(rep));
  }
  Raster out = idwt2(fused);
  return make_raster_like(in.ms, out.width, out.height, out.bands,
                          std::move(out.samples));
}

// --- Moment matching -------------------------------------------------------

Raster match_moments(const Raster& src, const Raster& ref) {
  if (src.bands != 1 || ref.bands != 1)
    fail(ErrorCode::invalid_argument, "match_moments needs single-band inputs");
  if (src.width != ref.width || src.height != ref.height)
    fail(ErrorCode::invalid_argument, "match_moments needs equal dimensions");
  const double src_mean = detail::mean_of(src.samples);
  const double ref_mean = detail::mean_of(ref.samples);
  const double src_std = detail::stddev_of(src.samples, src_mean);
  const double ref_std = detail::stddev_of(ref.samples, ref_mean);

  std::vector<double> out(src.samples.size());
  if (src_std < kStdFloor) {
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = src.samples[i] - src_mean + ref_mean;
  } else {
    const double scale = ref_std / src_std;
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = (src.samples[i] - src_mean) * scale + ref_mean;
  }
  return make_raster_like(src, src.width, src.height, 1, std::move(out));
}

// --- Dispatch and cascade --------------------------------------------------

FusionTag parse_fusion_tag(const std::string& name) {
  if (name == "brovey") return FusionTag::brovey;
  if (name == "ihs") return FusionTag::ihs;
  if (name == "pca") return FusionTag::pca;
  if (name == "wavelet") return FusionTag::wavelet;
  fail(ErrorCode::invalid_argument, "unknown fusion method \"" + name + "\"");
}

const char* fusion_tag_name(FusionTag tag) {
  switch (tag) {
    case FusionTag::brovey: return "brovey";
    case FusionTag::ihs: return "ihs";
    case FusionTag::pca: return "pca";
    case FusionTag::wavelet: return "wavelet";
  }
  return "unknown";
}

Raster fuse(const FusionInputs& in, const FusionMethod& method) {
  switch (method.tag) {
    case FusionTag::brovey: return fuse_brovey(in);
    case FusionTag::ihs: return fuse_ihs(in, method.match);
    case FusionTag::pca: return fuse_pca(in, method.pca_mode, method.match);
    case FusionTag::wavelet: return fuse_wavelet(in, method.levels, method.match);
  }
  fail(ErrorCode::invalid_argument, "unknown fusion tag");
}

Raster fuse_cascade(const FusionInputs& in,
                    const std::vector<FusionMethod>& stages) {
  if (stages.empty())
    fail(ErrorCode::invalid_argument, "cascade needs at least one stage");
  Raster ms = in.ms;
  for (std::size_t k = 0; k < stages.size(); ++k) {
    try {
      FusionInputs stage_in = make_fusion_inputs(std::move(ms), in.pan, in.ratio);
      ms = fuse(stage_in, stages[k]);
    } catch (const Error& e) {
      std::ostringstream os;
      os << "stage " << k + 1 << " (" << fusion_tag_name(stages[k].tag)
         << "): " << e.what();
      fail(e.code(), os.str());
    }
  }
  return ms;
}

}  // namespace panfuse
