#pragma once

#include <map>
#include <string>
#include <vector>

#include "panfuse/raster.hpp"

namespace panfuse {

struct MetricConfig {
  int ssim_window = 11;
  double ssim_sigma = 1.5;
  double ssim_k1 = 0.01;
  double ssim_k2 = 0.03;
  double sid_epsilon = 1e-12;  // probability floor
  // Scale ratio used to normalize REF for the quality index.
  double ratio = 1.0;
  // Empty means the defaults: the spectral group (sam, sid, scp) shares 0.5
  // evenly, the spatial group (ssim, edge, esr, ref) shares the other 0.5.
  std::map<std::string, double> weights;
};

std::map<std::string, double> default_metric_weights();

struct MetricReport {
  std::map<std::string, double> raw;
  std::map<std::string, double> normalized;
  std::map<std::string, double> weights;  // renormalized to sum 1
  double quality_index = 0.0;
  bool reduced_reference = false;
  std::vector<std::string> notes;

  /// Fixed key names; psnr infinity serialized as the string "inf".
  std::string to_json() const;
};

// --- Spectral fidelity -----------------------------------------------------

/// Mean per-pixel spectral angle in radians. Pixels where either spectrum
/// has norm < 1e-12 are skipped.
double sam(const Raster& fused, const Raster& reference);

/// Symmetric KL divergence (nats) between per-pixel spectra normalized to
/// probability distributions, floored at epsilon. Negative inputs are
/// shifted by the global minimum first.
double sid(const Raster& fused, const Raster& reference,
           double epsilon = 1e-12);

/// Mean per-band Pearson correlation between the Wald-degraded fused image
/// and the original low-resolution MS. Constant bands are skipped.
double spectral_content_preservation(const Raster& fused,
                                     const Raster& ms_original, int ratio);

// --- Spatial enhancement ---------------------------------------------------

/// Windowed SSIM with a normalized Gaussian window; mean over fully-interior
/// window positions. Dynamic range spans both rasters' nominal ranges.
double ssim(const Raster& a, const Raster& b, const MetricConfig& cfg = {});

/// Pearson correlation of 3x3 Sobel gradient-magnitude maps (interior only).
double edge_preservation(const Raster& fused_intensity, const Raster& pan);

/// Half-power frequency (cycles/pixel) of the radially averaged power
/// spectrum (mean removed, Hann window). Square power-of-two sides >= 16.
/// Returns 0 for an empty spectrum, 0.5 (Nyquist) if never below half power.
double mtf50(const Raster& img);

/// mtf50(fused) / mtf50(reference), clamped to [0, 1.5].
double esr(const Raster& fused_intensity, const Raster& reference_intensity);

/// mtf50(fused) / mtf50(upsampled MS intensity); ideally the scale ratio.
double resolution_enhancement_factor(const Raster& fused_intensity,
                                     const Raster& ms_up_intensity);

// --- Table-V auxiliaries ---------------------------------------------------

double rmse(const Raster& a, const Raster& b);
/// 20*log10(L/rmse); +infinity for identical inputs.
double psnr(const Raster& a, const Raster& b);

// --- Hybrid ----------------------------------------------------------------

/// Normalizes the raw metrics into [0,1] and combines them with the
/// (renormalized) weights. Every nonzero-weighted metric must be present.
MetricReport quality_index(const std::map<std::string, double>& raw,
                           const MetricConfig& cfg);

/// Full evaluation used by the CLI: every applicable metric plus the quality
/// index. Spectral/structural references come from ground_truth when given,
/// else from the bilinear-upsampled MS (reduced-reference, flagged).
MetricReport evaluate_fusion(const Raster& fused, const Raster& ms_original,
                             const Raster& pan, const Raster* ground_truth,
                             int ratio, const MetricConfig& cfg = {});

}  // namespace panfuse
