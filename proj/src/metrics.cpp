#include "panfuse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <charconv>
#include <limits>
#include <numbers>
#include <sstream>

#include "fft.hpp"
#include "imageops.hpp"
#include "panfuse/errors.hpp"
#include "panfuse/preprocess.hpp"

namespace panfuse {

namespace {

constexpr double kNormFloor = 1e-12;

void check_same_shape(const Raster& a, const Raster& b, const char* op) {
  if (!a.same_shape(b))
    fail(ErrorCode::invalid_argument,
         std::string(op) + ": shape mismatch (" + std::to_string(a.width) +
             "x" + std::to_string(a.height) + "x" + std::to_string(a.bands) +
             " vs " + std::to_string(b.width) + "x" + std::to_string(b.height) +
             "x" + std::to_string(b.bands) + ")");
}

double range_span(const Raster& a, const Raster& b) {
  // Union of both nominal ranges keeps the metric symmetric in its arguments.
  const double lo = std::min(a.nominal_range.first, b.nominal_range.first);
  const double hi = std::max(a.nominal_range.second, b.nominal_range.second);
  return hi - lo;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

std::map<std::string, double> default_metric_weights() {
  return {{"sam", 0.5 / 3}, {"sid", 0.5 / 3}, {"scp", 0.5 / 3},
          {"ssim", 0.5 / 4}, {"edge", 0.5 / 4}, {"esr", 0.5 / 4},
          {"ref", 0.5 / 4}};
}

// --- Spectral fidelity -----------------------------------------------------

double sam(const Raster& fused, const Raster& reference) {
  check_same_shape(fused, reference, "sam");
  if (fused.bands < 2)
    fail(ErrorCode::invalid_argument, "sam needs at least 2 bands");
  const std::size_t n = fused.pixel_count();
  const int b = fused.bands;
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t p = 0; p < n; ++p) {
    double nf = 0.0, nr = 0.0;
    for (int i = 0; i < b; ++i) {
      const double f = fused.samples[std::size_t(i) * n + p];
      const double r = reference.samples[std::size_t(i) * n + p];
      nf += f * f;
      nr += r * r;
    }
    nf = std::sqrt(nf);
    nr = std::sqrt(nr);
    if (nf < kNormFloor || nr < kNormFloor) continue;
    // Angle via 2*atan2(|u-v|, |u+v|) on the unit spectra; acos(dot) would
    // turn ~1e-16 of rounding into ~1e-8 of angle near identical pixels.
    double d2 = 0.0, s2 = 0.0;
    for (int i = 0; i < b; ++i) {
      const double u = fused.samples[std::size_t(i) * n + p] / nf;
      const double v = reference.samples[std::size_t(i) * n + p] / nr;
      d2 += (u - v) * (u - v);
      s2 += (u + v) * (u + v);
    }
    sum += 2.0 * std::atan2(std::sqrt(d2), std::sqrt(s2));
    ++used;
  }
  if (used == 0)
    fail(ErrorCode::degenerate_input, "sam: every pixel spectrum is degenerate");
  return sum / double(used);
}

double sid(const Raster& fused, const Raster& reference, double epsilon) {
  check_same_shape(fused, reference, "sid");
  if (fused.bands < 2)
    fail(ErrorCode::invalid_argument, "sid needs at least 2 bands");
  if (epsilon <= 0.0)
    fail(ErrorCode::invalid_argument, "sid epsilon must be positive");

  double global_min = 0.0;
  for (double v : fused.samples) global_min = std::min(global_min, v);
  for (double v : reference.samples) global_min = std::min(global_min, v);
  const double shift = global_min < 0.0 ? -global_min : 0.0;

  const std::size_t n = fused.pixel_count();
  const int b = fused.bands;
  std::vector<double> p(b), q(b);
  double sum = 0.0;
  for (std::size_t px = 0; px < n; ++px) {
    double ps = 0.0, qs = 0.0;
    for (int i = 0; i < b; ++i) {
      p[i] = std::max(fused.samples[std::size_t(i) * n + px] + shift, epsilon);
      q[i] = std::max(reference.samples[std::size_t(i) * n + px] + shift, epsilon);
      ps += p[i];
      qs += q[i];
    }
    double d = 0.0;
    for (int i = 0; i < b; ++i) {
      const double pi = p[i] / ps;
      const double qi = q[i] / qs;
      d += pi * std::log(pi / qi) + qi * std::log(qi / pi);
    }
    sum += d;
  }
  return sum / double(n);
}

double spectral_content_preservation(const Raster& fused,
                                     const Raster& ms_original, int ratio) {
  if (ratio < 1) fail(ErrorCode::invalid_argument, "ratio must be >= 1");
  if (fused.bands != ms_original.bands)
    fail(ErrorCode::invalid_argument, "scp: band count mismatch");
  if (fused.width != ms_original.width * ratio ||
      fused.height != ms_original.height * ratio)
    fail(ErrorCode::invalid_argument,
         "scp: fused dims must equal ms dims times ratio");

  const Raster degraded = detail::degrade_to_grid(fused, ratio);
  double sum = 0.0;
  int used = 0;
  for (int b = 0; b < fused.bands; ++b) {
    const auto da = degraded.band(b);
    const auto db = ms_original.band(b);
    const double sa = detail::stddev_of(da, detail::mean_of(da));
    const double sb = detail::stddev_of(db, detail::mean_of(db));
    if (sa < kNormFloor || sb < kNormFloor) continue;
    bool degenerate = false;
    const double r = detail::pearson(da, db, &degenerate);
    if (degenerate) continue;
    sum += r;
    ++used;
  }
  if (used == 0)
    fail(ErrorCode::degenerate_input, "scp: every band is constant");
  return sum / double(used);
}

// --- Spatial enhancement ---------------------------------------------------

double ssim(const Raster& a, const Raster& b, const MetricConfig& cfg) {
  check_same_shape(a, b, "ssim");
  if (a.bands != 1)
    fail(ErrorCode::invalid_argument, "ssim operates on single-band rasters");
  const int win = cfg.ssim_window;
  if (win < 3 || win % 2 == 0)
    fail(ErrorCode::invalid_argument, "ssim window must be odd and >= 3");
  if (cfg.ssim_sigma <= 0.0)
    fail(ErrorCode::invalid_argument, "ssim sigma must be positive");
  if (a.width < win || a.height < win)
    fail(ErrorCode::invalid_argument,
         "image smaller than ssim window (" + std::to_string(a.width) + "x" +
             std::to_string(a.height) + " < " + std::to_string(win) + ")");

  // normalized 2-D Gaussian window
  std::vector<double> w(std::size_t(win) * win);
  const int half = win / 2;
  double wsum = 0.0;
  for (int y = 0; y < win; ++y)
    for (int x = 0; x < win; ++x) {
      const double dx = x - half, dy = y - half;
      const double v =
          std::exp(-(dx * dx + dy * dy) / (2.0 * cfg.ssim_sigma * cfg.ssim_sigma));
      w[std::size_t(y) * win + x] = v;
      wsum += v;
    }
  for (double& v : w) v /= wsum;

  const double L = range_span(a, b);
  const double c1 = (cfg.ssim_k1 * L) * (cfg.ssim_k1 * L);
  const double c2 = (cfg.ssim_k2 * L) * (cfg.ssim_k2 * L);

  const int W = a.width, H = a.height;
  double total = 0.0;
  std::size_t count = 0;
  for (int oy = 0; oy + win <= H; ++oy)
    for (int ox = 0; ox + win <= W; ++ox) {
      double mx = 0.0, my = 0.0, xx = 0.0, yy = 0.0, xy = 0.0;
      for (int y = 0; y < win; ++y)
        for (int x = 0; x < win; ++x) {
          const double wv = w[std::size_t(y) * win + x];
          const double av = a.samples[std::size_t(oy + y) * W + ox + x];
          const double bv = b.samples[std::size_t(oy + y) * W + ox + x];
          mx += wv * av;
          my += wv * bv;
          xx += wv * av * av;
          yy += wv * bv * bv;
          xy += wv * av * bv;
        }
      const double vx = xx - mx * mx;
      const double vy = yy - my * my;
      const double cxy = xy - mx * my;
      const double num = (2.0 * mx * my + c1) * (2.0 * cxy + c2);
      const double den = (mx * mx + my * my + c1) * (vx + vy + c2);
      total += num / den;
      ++count;
    }
  return total / double(count);
}

double edge_preservation(const Raster& fused_intensity, const Raster& pan) {
  check_same_shape(fused_intensity, pan, "edge_preservation");
  if (fused_intensity.bands != 1)
    fail(ErrorCode::invalid_argument,
         "edge_preservation operates on single-band rasters");
  if (fused_intensity.width < 3 || fused_intensity.height < 3)
    fail(ErrorCode::invalid_argument,
         "edge_preservation needs dims >= 3 for the Sobel stencil");
  const std::vector<double> ga = detail::sobel_magnitude(fused_intensity);
  const std::vector<double> gb = detail::sobel_magnitude(pan);
  bool degenerate = false;
  const double r = detail::pearson(ga, gb, &degenerate);
  if (degenerate)
    fail(ErrorCode::degenerate_input,
         "edge_preservation: constant gradient-magnitude map");
  return r;
}

namespace {

bool mtf_eligible(const Raster& img) {
  return img.bands == 1 && img.width == img.height && img.width >= 16 &&
         detail::is_pow2(img.width);
}

// Radially averaged, normalized, 3-bin-smoothed power-spectrum profile over
// bins k = 1..n/2 (bin k holds frequencies near k/n cycles/pixel).
// Returns empty when the spectrum has no energy at bin 1.
std::vector<double> mtf_profile(const Raster& img) {
  const int n = img.width;
  const std::size_t total = img.samples.size();
  const double mean = detail::mean_of(img.samples);

  std::vector<double> windowed(total);
  std::vector<double> hann(n);
  for (int i = 0; i < n; ++i)
    hann[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / (n - 1)));
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      windowed[std::size_t(y) * n + x] =
          (img.samples[std::size_t(y) * n + x] - mean) * hann[x] * hann[y];

  const auto spec = detail::fft2_real(windowed, n);

  const int kmax = n / 2;
  std::vector<double> power(kmax + 1, 0.0);
  std::vector<std::size_t> hits(kmax + 1, 0);
  for (int v = 0; v < n; ++v) {
    const int sv = v <= n / 2 ? v : v - n;
    for (int u = 0; u < n; ++u) {
      const int su = u <= n / 2 ? u : u - n;
      const int k = int(std::llround(std::sqrt(double(su) * su + double(sv) * sv)));
      if (k > kmax) continue;
      power[k] += std::norm(spec[std::size_t(v) * n + u]);
      ++hits[k];
    }
  }
  for (int k = 0; k <= kmax; ++k)
    if (hits[k]) power[k] /= double(hits[k]);

  if (power[1] <= 0.0) return {};

  std::vector<double> s(kmax + 1, 0.0);
  for (int k = 1; k <= kmax; ++k) s[k] = power[k] / power[1];

  // 3-bin moving average clipped to [1, kmax]; bin 0 (DC) is excluded.
  std::vector<double> smoothed(kmax + 1, 0.0);
  for (int k = 1; k <= kmax; ++k) {
    double acc = s[k];
    int cnt = 1;
    if (k - 1 >= 1) { acc += s[k - 1]; ++cnt; }
    if (k + 1 <= kmax) { acc += s[k + 1]; ++cnt; }
    smoothed[k] = acc / cnt;
  }
  return smoothed;
}

}  // namespace

double mtf50(const Raster& img) {
  if (img.bands != 1)
    fail(ErrorCode::invalid_argument, "mtf50 operates on single-band rasters");
  if (img.width != img.height || img.width < 16 || !detail::is_pow2(img.width))
    fail(ErrorCode::invalid_argument,
         "mtf50 needs a square power-of-two image with side >= 16 (got " +
             std::to_string(img.width) + "x" + std::to_string(img.height) + ")");

  const std::vector<double> m = mtf_profile(img);
  if (m.empty()) return 0.0;  // zero spectrum: no content

  const int n = img.width;
  const int kmax = n / 2;
  for (int k = 2; k <= kmax; ++k) {
    if (m[k] < 0.5 && m[k - 1] >= 0.5) {
      const double t = (m[k - 1] - 0.5) / (m[k - 1] - m[k]);
      return (double(k - 1) + t) / double(n);
    }
  }
  return 0.5;  // never drops below half power: Nyquist
}

double esr(const Raster& fused_intensity, const Raster& reference_intensity) {
  const double mr = mtf50(reference_intensity);
  if (mr == 0.0)
    fail(ErrorCode::degenerate_input, "esr: reference mtf50 is zero");
  const double mf = mtf50(fused_intensity);
  return std::clamp(mf / mr, 0.0, 1.5);
}

double resolution_enhancement_factor(const Raster& fused_intensity,
                                     const Raster& ms_up_intensity) {
  check_same_shape(fused_intensity, ms_up_intensity,
                   "resolution_enhancement_factor");
  const double md = mtf50(ms_up_intensity);
  if (md == 0.0)
    fail(ErrorCode::degenerate_input,
         "resolution_enhancement_factor: upsampled-MS mtf50 is zero");
  return mtf50(fused_intensity) / md;
}

// --- Table-V auxiliaries ---------------------------------------------------

double rmse(const Raster& a, const Raster& b) {
  check_same_shape(a, b, "rmse");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const double d = a.samples[i] - b.samples[i];
    acc += d * d;
  }
  return std::sqrt(acc / double(a.samples.size()));
}

double psnr(const Raster& a, const Raster& b) {
  const double e = rmse(a, b);
  if (e == 0.0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(range_span(a, b) / e);
}

// --- Hybrid ----------------------------------------------------------------

namespace {

double normalize_metric(const std::string& name, double raw, double ratio) {
  if (name == "sam") return 1.0 - clamp01(raw / (std::numbers::pi / 2.0));
  if (name == "sid") return std::exp(-raw);
  if (name == "scp") return (raw + 1.0) / 2.0;
  if (name == "ssim") return (raw + 1.0) / 2.0;
  if (name == "edge") return (raw + 1.0) / 2.0;
  if (name == "esr") return clamp01(raw);
  if (name == "ref") return clamp01(raw / ratio);
  fail(ErrorCode::invalid_argument,
       "no normalization defined for metric \"" + name + "\"");
}

bool has_normalization(const std::string& name) {
  static const char* known[] = {"sam", "sid", "scp", "ssim",
                                "edge", "esr", "ref"};
  for (const char* k : known)
    if (name == k) return true;
  return false;
}

}  // namespace

MetricReport quality_index(const std::map<std::string, double>& raw,
                           const MetricConfig& cfg) {
  std::map<std::string, double> weights =
      cfg.weights.empty() ? default_metric_weights() : cfg.weights;

  double wsum = 0.0;
  for (const auto& [name, w] : weights) {
    if (!has_normalization(name))
      fail(ErrorCode::invalid_argument,
           "weight names unknown metric \"" + name + "\"");
    if (w < 0.0)
      fail(ErrorCode::invalid_argument,
           "negative weight for metric \"" + name + "\"");
    if (w > 0.0 && !raw.count(name))
      fail(ErrorCode::invalid_argument,
           "weighted metric \"" + name + "\" missing from raw values");
    wsum += w;
  }
  if (wsum <= 0.0)
    fail(ErrorCode::invalid_argument, "metric weights must sum to > 0");
  for (auto& [name, w] : weights) w /= wsum;

  MetricReport report;
  report.raw = raw;
  report.weights = weights;
  if (cfg.ratio < 1.0)
    fail(ErrorCode::invalid_argument, "metric config ratio must be >= 1");
  for (const auto& [name, value] : raw)
    if (has_normalization(name))
      report.normalized[name] = normalize_metric(name, value, cfg.ratio);

  double qi = 0.0;
  for (const auto& [name, w] : weights)
    if (w > 0.0) qi += w * report.normalized.at(name);
  report.quality_index = qi;
  return report;
}

MetricReport evaluate_fusion(const Raster& fused, const Raster& ms_original,
                             const Raster& pan, const Raster* ground_truth,
                             int ratio, const MetricConfig& cfg) {
  if (ratio < 1) fail(ErrorCode::invalid_argument, "ratio must be >= 1");
  if (fused.width != ms_original.width * ratio ||
      fused.height != ms_original.height * ratio)
    fail(ErrorCode::invalid_argument,
         "fused dims must equal ms dims times ratio");
  if (pan.bands != 1 || pan.width != fused.width || pan.height != fused.height)
    fail(ErrorCode::invalid_argument,
         "pan must be single-band on the fused grid");
  if (fused.bands != ms_original.bands)
    fail(ErrorCode::invalid_argument, "fused/ms band count mismatch");
  if (ground_truth && !ground_truth->same_shape(fused))
    fail(ErrorCode::invalid_argument, "ground truth shape mismatch");

  std::vector<std::string> notes;
  const Raster ms_up = resample(ms_original, fused.width, fused.height,
                                ResampleMethod::bilinear);
  const Raster* reference = ground_truth;
  Raster fallback;
  if (!reference) {
    fallback = ms_up;
    reference = &fallback;
    notes.push_back("reduced_reference: scored against bilinear-upsampled MS");
  }

  const Raster fused_i = to_intensity(fused);
  const Raster ref_i = to_intensity(*reference);
  const Raster ms_up_i = to_intensity(ms_up);

  std::map<std::string, double> raw;
  auto skip = [&notes](const std::string& name, const std::string& why) {
    notes.push_back(name + " skipped: " + why);
  };

  if (fused.bands >= 2) {
    raw["sam"] = sam(fused, *reference);
    raw["sid"] = sid(fused, *reference, cfg.sid_epsilon);
    double global_min = 0.0;
    for (double v : fused.samples) global_min = std::min(global_min, v);
    for (double v : reference->samples) global_min = std::min(global_min, v);
    if (global_min < 0.0)
      notes.push_back("sid: inputs shifted by " + std::to_string(-global_min) +
                      " to restore nonnegativity");
  } else {
    skip("sam", "needs at least 2 bands");
    skip("sid", "needs at least 2 bands");
  }

  raw["scp"] = spectral_content_preservation(fused, ms_original, ratio);

  if (fused.width >= cfg.ssim_window && fused.height >= cfg.ssim_window)
    raw["ssim"] = ssim(fused_i, ref_i, cfg);
  else
    skip("ssim", "image smaller than the ssim window");

  if (fused.width >= 3 && fused.height >= 3)
    raw["edge"] = edge_preservation(fused_i, pan);
  else
    skip("edge", "needs dims >= 3");

  if (mtf_eligible(fused_i)) {
    // With ground truth, spatial resolution is judged against it; without,
    // the pan image is the only full-resolution reference available.
    const Raster& esr_ref = ground_truth ? ref_i : pan;
    raw["esr"] = esr(fused_i, esr_ref);
    raw["ref"] = resolution_enhancement_factor(fused_i, ms_up_i);
  } else {
    skip("esr", "needs a square power-of-two image with side >= 16");
    skip("ref", "needs a square power-of-two image with side >= 16");
  }

  raw["rmse"] = rmse(fused, *reference);
  raw["psnr"] = psnr(fused, *reference);

  MetricConfig qcfg = cfg;
  qcfg.ratio = double(ratio);
  if (qcfg.weights.empty()) qcfg.weights = default_metric_weights();
  for (auto it = qcfg.weights.begin(); it != qcfg.weights.end();) {
    if (has_normalization(it->first) && !raw.count(it->first)) {
      notes.push_back("weight for \"" + it->first +
                      "\" dropped: metric not applicable");
      it = qcfg.weights.erase(it);
    } else {
      ++it;
    }
  }
  if (qcfg.weights.empty())
    fail(ErrorCode::degenerate_input,
         "no weighted metric is applicable to these inputs");

  MetricReport report = quality_index(raw, qcfg);
  report.reduced_reference = ground_truth == nullptr;
  report.notes = std::move(notes);
  return report;
}

// --- Serialization ----------------------------------------------------------

namespace {

std::string fmt9(double v) {
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::general, 9);
  return std::string(buf, res.ptr);
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

// Canonical metric order used for every serialized map.
const char* kMetricOrder[] = {"sam", "sid", "scp", "ssim", "edge",
                              "esr", "ref", "psnr", "rmse"};

void append_map(std::ostringstream& os, const std::map<std::string, double>& m) {
  os << '{';
  bool first = true;
  for (const char* name : kMetricOrder) {
    const auto it = m.find(name);
    if (it == m.end()) continue;
    if (!first) os << ',';
    first = false;
    os << '"' << name << "\":" << fmt9(it->second);
  }
  // names outside the canonical list (none today) keep map order
  for (const auto& [name, value] : m) {
    bool canonical = false;
    for (const char* k : kMetricOrder)
      if (name == k) canonical = true;
    if (canonical) continue;
    if (!first) os << ',';
    first = false;
    os << '"' << json_escape(name) << "\":" << fmt9(value);
  }
  os << '}';
}

}  // namespace

std::string MetricReport::to_json() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const char* name : kMetricOrder) {
    const auto it = raw.find(name);
    if (it == raw.end()) continue;
    if (!first) os << ',';
    first = false;
    os << '"' << name << "\":" << fmt9(it->second);
  }
  if (!first) os << ',';
  os << "\"quality_index\":" << fmt9(quality_index);
  os << ",\"normalized\":";
  append_map(os, normalized);
  os << ",\"weights\":";
  append_map(os, weights);
  os << ",\"reduced_reference\":" << (reduced_reference ? "true" : "false");
  os << ",\"notes\":[";
  for (std::size_t i = 0; i < notes.size(); ++i) {
    if (i) os << ',';
    os << '"' << json_escape(notes[i]) << '"';
  }
  os << "]}";
  return os.str();
}

}  // namespace panfuse
