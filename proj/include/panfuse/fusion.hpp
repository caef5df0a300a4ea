#pragma once

#include <string>
#include <utility>
#include <vector>

#include "panfuse/raster.hpp"

namespace panfuse {

/// Registered fusion pair: multispectral raster already resampled to the
/// pan grid, single-band panchromatic raster, and the original
/// pan-to-MS resolution ratio.
struct FusionInputs {
  Raster ms;
  Raster pan;
  int ratio = 1;
};

FusionInputs make_fusion_inputs(Raster ms, Raster pan, int ratio);

// --- PCA -------------------------------------------------------------------

/// Band-space PCA model. `components` is row-major bands x bands; rows are
/// principal axes ordered by descending eigenvalue, each row signed so its
/// largest-magnitude entry is positive.
struct PcaModel {
  int bands = 0;
  std::vector<double> mean;         // length bands
  std::vector<double> components;   // row-major bands x bands
  std::vector<double> eigenvalues;  // nonincreasing, clamped at 0
};

/// Eigendecomposition of the band covariance (n-1 divisor) via cyclic
/// Jacobi rotations. Needs bands >= 2 and at least bands+1 pixels.
PcaModel fit_pca(const Raster& ms);
Raster pca_forward(const Raster& ms, const PcaModel& model);
Raster pca_inverse(const Raster& scores, const PcaModel& model);

// --- 2-D Haar wavelet ------------------------------------------------------

/// Orthonormal Haar pyramid. details[0] is the finest level. Odd inputs are
/// edge-padded to even dims before each level; level_dims keeps the pre-pad
/// dims so idwt2 can crop back exactly.
struct WaveletPyramid {
  struct DetailSet {
    Raster lh, hl, hh;
  };
  int levels = 0;
  Raster approximation;  // coarsest LL
  std::vector<DetailSet> details;
  std::vector<std::pair<int, int>> level_dims;
};

WaveletPyramid dwt2(const Raster& r, int levels);
Raster idwt2(const WaveletPyramid& p);

// --- Fusion methods --------------------------------------------------------

enum class FusionTag { brovey, ihs, pca, wavelet };
enum class PcaMode { substitute, paper_literal };

struct FusionMethod {
  FusionTag tag = FusionTag::brovey;
  PcaMode pca_mode = PcaMode::substitute;
  int levels = 0;     // wavelet; 0 = ceil(log2(ratio)), min 1
  bool match = true;  // moment matching for ihs/pca/wavelet
};

FusionTag parse_fusion_tag(const std::string& name);
const char* fusion_tag_name(FusionTag tag);

/// F = M * P / mean(P), per band per pixel.
Raster fuse_brovey(const FusionInputs& in);

/// Intensity replacement via the additive delta: F_b = M_b + (P' - I)
/// where I is the band mean and P' is the (optionally moment-matched) pan.
/// Requires exactly 3 bands.
Raster fuse_ihs(const FusionInputs& in, bool match = true);

/// substitute: replace the first-component score plane with the matched pan
/// and invert. paper_literal: F_b = pca_forward(ms)_b + P.
Raster fuse_pca(const FusionInputs& in, PcaMode mode = PcaMode::substitute,
                bool match = true);

/// MS approximation subband + pan detail subbands at every level.
Raster fuse_wavelet(const FusionInputs& in, int levels = 0, bool match = true);

/// Affine rescale of src to ref's mean/std (n-1 divisor). Constant src
/// falls back to an offset-only shift.
Raster match_moments(const Raster& src, const Raster& ref);

/// Dispatch on method.tag.
Raster fuse(const FusionInputs& in, const FusionMethod& method);

/// Left-to-right composition: each stage fuses the previous stage's output
/// with the original pan. Stage errors are rethrown tagged with the stage
/// index.
Raster fuse_cascade(const FusionInputs& in,
                    const std::vector<FusionMethod>& stages);

}  // namespace panfuse
