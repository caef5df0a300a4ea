#include "panfuse/panfuse.h"

#include <cstring>
#include <exception>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "panfuse/dataset.hpp"
#include "panfuse/errors.hpp"
#include "panfuse/fusion.hpp"
#include "panfuse/metrics.hpp"
#include "panfuse/preprocess.hpp"
#include "panfuse/raster.hpp"

struct pf_raster {
  panfuse::Raster r;
};

namespace {

thread_local std::string g_last_error;

pf_status map_code(panfuse::ErrorCode code) {
  using panfuse::ErrorCode;
  switch (code) {
    case ErrorCode::invalid_argument: return PF_ERROR_INVALID_ARGUMENT;
    case ErrorCode::io: return PF_ERROR_IO;
    case ErrorCode::parse: return PF_ERROR_PARSE;
    case ErrorCode::degenerate_input: return PF_ERROR_DEGENERATE_INPUT;
    case ErrorCode::unsupported: return PF_ERROR_UNSUPPORTED;
    case ErrorCode::numeric: return PF_ERROR_NUMERIC;
    case ErrorCode::insufficient_data: return PF_ERROR_INSUFFICIENT_DATA;
  }
  return PF_ERROR_INTERNAL;
}

pf_status set_error(pf_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs fn, translating exceptions into statuses and pf_last_error text.
template <typename Fn>
pf_status guarded(Fn&& fn) {
  try {
    fn();
    return PF_OK;
  } catch (const panfuse::Error& e) {
    return set_error(map_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(PF_ERROR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(PF_ERROR_INTERNAL, e.what());
  } catch (...) {
    return set_error(PF_ERROR_INTERNAL, "unknown error");
  }
}

pf_status require(bool ok, const char* what) {
  if (ok) return PF_OK;
  return set_error(PF_ERROR_INVALID_ARGUMENT, what);
}

pf_status emit(panfuse::Raster r, pf_raster** out) {
  *out = new pf_raster{std::move(r)};
  return PF_OK;
}

std::vector<panfuse::FusionMethod> parse_methods(const char* spec,
                                                 const pf_fusion_options* opts) {
  pf_fusion_options defaults;
  pf_fusion_options_default(&defaults);
  const pf_fusion_options& o = opts ? *opts : defaults;

  std::vector<panfuse::FusionMethod> methods;
  std::stringstream ss(spec);
  std::string token;
  while (std::getline(ss, token, ',')) {
    // trim surrounding spaces
    const auto first = token.find_first_not_of(" \t");
    const auto last = token.find_last_not_of(" \t");
    if (first == std::string::npos)
      panfuse::fail(panfuse::ErrorCode::invalid_argument,
                    "empty method name in list");
    token = token.substr(first, last - first + 1);

    panfuse::FusionMethod m;
    m.tag = panfuse::parse_fusion_tag(token);
    m.levels = o.levels;
    m.pca_mode = o.pca_literal ? panfuse::PcaMode::paper_literal
                               : panfuse::PcaMode::substitute;
    m.match = o.match != 0;
    methods.push_back(m);
  }
  if (methods.empty())
    panfuse::fail(panfuse::ErrorCode::invalid_argument, "empty method list");
  return methods;
}

}  // namespace

extern "C" {

const char* pf_last_error(void) { return g_last_error.c_str(); }

const char* pf_version(void) { return "1.0.0"; }

pf_status pf_raster_create(int width, int height, int bands,
                           const double* samples, pf_raster** out) {
  if (pf_status s = require(out != nullptr, "out is NULL"); s != PF_OK) return s;
  if (pf_status s = require(samples != nullptr, "samples is NULL"); s != PF_OK)
    return s;
  return guarded([&] {
    const std::size_t n = std::size_t(width) * height * bands;
    emit(panfuse::make_raster(width, height, bands,
                              std::vector<double>(samples, samples + n)),
         out);
  });
}

void pf_raster_free(pf_raster* r) { delete r; }

int pf_raster_width(const pf_raster* r) { return r ? r->r.width : 0; }
int pf_raster_height(const pf_raster* r) { return r ? r->r.height : 0; }
int pf_raster_bands(const pf_raster* r) { return r ? r->r.bands : 0; }

const double* pf_raster_samples(const pf_raster* r) {
  return r ? r->r.samples.data() : nullptr;
}

pf_status pf_raster_set_range(pf_raster* r, double lo, double hi) {
  if (pf_status s = require(r != nullptr, "raster is NULL"); s != PF_OK)
    return s;
  if (pf_status s = require(lo < hi, "range must satisfy lo < hi"); s != PF_OK)
    return s;
  r->r.nominal_range = {lo, hi};
  return PF_OK;
}

pf_status pf_raster_get_range(const pf_raster* r, double* lo, double* hi) {
  if (pf_status s = require(r && lo && hi, "NULL argument"); s != PF_OK)
    return s;
  *lo = r->r.nominal_range.first;
  *hi = r->r.nominal_range.second;
  return PF_OK;
}

pf_status pf_raster_read(const char* path, pf_raster** out) {
  if (pf_status s = require(path && out, "NULL argument"); s != PF_OK) return s;
  return guarded([&] { emit(panfuse::read_container(path), out); });
}

pf_status pf_raster_write(const pf_raster* r, const char* path) {
  if (pf_status s = require(r && path, "NULL argument"); s != PF_OK) return s;
  return guarded([&] { panfuse::write_container(r->r, path); });
}

pf_status pf_raster_import_png(const char* path, pf_raster** out) {
  if (pf_status s = require(path && out, "NULL argument"); s != PF_OK) return s;
  return guarded([&] { emit(panfuse::import_png(path), out); });
}

pf_status pf_raster_export_png(const pf_raster* r, const char* path) {
  if (pf_status s = require(r && path, "NULL argument"); s != PF_OK) return s;
  return guarded([&] { panfuse::export_png(r->r, path); });
}

pf_status pf_raster_crc32(const pf_raster* r, uint32_t* out) {
  if (pf_status s = require(r && out, "NULL argument"); s != PF_OK) return s;
  return guarded([&] { *out = panfuse::payload_crc32(r->r); });
}

pf_status pf_resample(const pf_raster* r, int width, int height,
                      const char* method, pf_raster** out) {
  if (pf_status s = require(r && method && out, "NULL argument"); s != PF_OK)
    return s;
  return guarded([&] {
    panfuse::ResampleMethod m;
    if (std::strcmp(method, "nearest") == 0)
      m = panfuse::ResampleMethod::nearest;
    else if (std::strcmp(method, "bilinear") == 0)
      m = panfuse::ResampleMethod::bilinear;
    else
      panfuse::fail(panfuse::ErrorCode::invalid_argument,
                    "resample method must be \"nearest\" or \"bilinear\"");
    emit(panfuse::resample(r->r, width, height, m), out);
  });
}

pf_status pf_estimate_shift(const pf_raster* reference, const pf_raster* moving,
                            int max_shift, int* dx, int* dy, double* score) {
  if (pf_status s = require(reference && moving && dx && dy && score,
                            "NULL argument");
      s != PF_OK)
    return s;
  return guarded([&] {
    const panfuse::ShiftEstimate e =
        panfuse::estimate_shift(reference->r, moving->r, max_shift);
    *dx = e.dx;
    *dy = e.dy;
    *score = e.score;
  });
}

pf_status pf_apply_shift(const pf_raster* r, int dx, int dy, pf_raster** out) {
  if (pf_status s = require(r && out, "NULL argument"); s != PF_OK) return s;
  return guarded([&] { emit(panfuse::apply_shift(r->r, dx, dy), out); });
}

pf_status pf_calibrate(const pf_raster* r, const double* gains,
                       const double* offsets, int count, pf_raster** out) {
  if (pf_status s = require(r && gains && offsets && out, "NULL argument");
      s != PF_OK)
    return s;
  return guarded([&] {
    panfuse::CalibrationParams p;
    p.gains.assign(gains, gains + count);
    p.offsets.assign(offsets, offsets + count);
    emit(panfuse::radiometric_calibrate(r->r, p), out);
  });
}

pf_status pf_dos_correct(const pf_raster* r, double percentile,
                         pf_raster** out) {
  if (pf_status s = require(r && out, "NULL argument"); s != PF_OK) return s;
  return guarded([&] { emit(panfuse::dos_correct(r->r, percentile), out); });
}

pf_status pf_to_intensity(const pf_raster* r, pf_raster** out) {
  if (pf_status s = require(r && out, "NULL argument"); s != PF_OK) return s;
  return guarded([&] { emit(panfuse::to_intensity(r->r), out); });
}

void pf_fusion_options_default(pf_fusion_options* opts) {
  if (!opts) return;
  opts->levels = 0;
  opts->pca_literal = 0;
  opts->match = 1;
}

pf_status pf_fuse(const pf_raster* ms, const pf_raster* pan, int ratio,
                  const char* method, const pf_fusion_options* opts,
                  pf_raster** out) {
  if (pf_status s = require(ms && pan && method && out, "NULL argument");
      s != PF_OK)
    return s;
  return guarded([&] {
    const auto methods = parse_methods(method, opts);
    if (methods.size() != 1)
      panfuse::fail(panfuse::ErrorCode::invalid_argument,
                    "pf_fuse takes a single method; use pf_fuse_cascade");
    const panfuse::FusionInputs in =
        panfuse::make_fusion_inputs(ms->r, pan->r, ratio);
    emit(panfuse::fuse(in, methods[0]), out);
  });
}

pf_status pf_fuse_cascade(const pf_raster* ms, const pf_raster* pan, int ratio,
                          const char* stages, const pf_fusion_options* opts,
                          pf_raster** out) {
  if (pf_status s = require(ms && pan && stages && out, "NULL argument");
      s != PF_OK)
    return s;
  return guarded([&] {
    const auto methods = parse_methods(stages, opts);
    const panfuse::FusionInputs in =
        panfuse::make_fusion_inputs(ms->r, pan->r, ratio);
    emit(panfuse::fuse_cascade(in, methods), out);
  });
}

pf_status pf_generate_scene(int side, int bands, int n_blobs, int n_shapes,
                            uint64_t seed, double lo, double hi,
                            pf_raster** out) {
  if (pf_status s = require(out != nullptr, "out is NULL"); s != PF_OK)
    return s;
  return guarded([&] {
    panfuse::SceneSpec spec;
    spec.side = side;
    spec.bands = bands;
    spec.n_blobs = n_blobs;
    spec.n_shapes = n_shapes;
    spec.seed = seed;
    spec.value_range = {lo, hi};
    emit(panfuse::generate_scene(spec), out);
  });
}

pf_status pf_simulate_pan(const pf_raster* gt, const double* weights, int count,
                          pf_raster** out) {
  if (pf_status s = require(gt && weights && out, "NULL argument"); s != PF_OK)
    return s;
  return guarded([&] {
    emit(panfuse::simulate_pan(gt->r,
                               std::vector<double>(weights, weights + count)),
         out);
  });
}

pf_status pf_wald_degrade(const pf_raster* gt, int ratio, pf_raster** out) {
  if (pf_status s = require(gt && out, "NULL argument"); s != PF_OK) return s;
  return guarded([&] { emit(panfuse::wald_degrade(gt->r, ratio), out); });
}

pf_status pf_evaluate(const pf_raster* fused, const pf_raster* ms,
                      const pf_raster* pan, const pf_raster* ground_truth,
                      int ratio, const char* const* weight_names,
                      const double* weight_values, int n_weights,
                      char** out_json) {
  if (pf_status s = require(fused && ms && pan && out_json, "NULL argument");
      s != PF_OK)
    return s;
  if (pf_status s = require(n_weights == 0 || (weight_names && weight_values),
                            "weight arrays are NULL");
      s != PF_OK)
    return s;
  return guarded([&] {
    panfuse::MetricConfig cfg;
    for (int i = 0; i < n_weights; ++i) {
      if (!weight_names[i])
        panfuse::fail(panfuse::ErrorCode::invalid_argument,
                      "weight name is NULL");
      cfg.weights[weight_names[i]] = weight_values[i];
    }
    const panfuse::MetricReport report = panfuse::evaluate_fusion(
        fused->r, ms->r, pan->r, ground_truth ? &ground_truth->r : nullptr,
        ratio, cfg);
    const std::string json = report.to_json();
    char* buf = new char[json.size() + 1];
    std::memcpy(buf, json.c_str(), json.size() + 1);
    *out_json = buf;
  });
}

void pf_string_free(char* s) { delete[] s; }

}  // extern "C"
