/* C API for the pan-sharpening core. All functions return pf_status and
 * report results through out-parameters; pf_last_error() describes the most
 * recent failure on the calling thread. Handles are opaque and must be
 * released with the matching free function. */

#ifndef PANFUSE_H
#define PANFUSE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PF_API __declspec(dllexport)
#else
#define PF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pf_status {
  PF_OK = 0,
  PF_ERROR_INVALID_ARGUMENT = 1,
  PF_ERROR_IO = 2,
  PF_ERROR_PARSE = 3,
  PF_ERROR_DEGENERATE_INPUT = 4,
  PF_ERROR_UNSUPPORTED = 5,
  PF_ERROR_NUMERIC = 6,
  PF_ERROR_INSUFFICIENT_DATA = 7,
  PF_ERROR_INTERNAL = 8
} pf_status;

typedef struct pf_raster pf_raster;

/* Message for the last failing call on this thread; never NULL. */
PF_API const char* pf_last_error(void);

PF_API const char* pf_version(void);

/* --- raster lifecycle --------------------------------------------------- */

/* samples: band-sequential, width*height*bands doubles, all finite. */
PF_API pf_status pf_raster_create(int width, int height, int bands,
                                  const double* samples, pf_raster** out);
PF_API void pf_raster_free(pf_raster* r);

PF_API int pf_raster_width(const pf_raster* r);
PF_API int pf_raster_height(const pf_raster* r);
PF_API int pf_raster_bands(const pf_raster* r);
/* Borrowed pointer to the band-sequential samples; valid until the raster
 * is freed or mutated. */
PF_API const double* pf_raster_samples(const pf_raster* r);

PF_API pf_status pf_raster_set_range(pf_raster* r, double lo, double hi);
PF_API pf_status pf_raster_get_range(const pf_raster* r, double* lo,
                                     double* hi);

/* --- container and PNG I/O ---------------------------------------------- */

PF_API pf_status pf_raster_read(const char* path, pf_raster** out);
PF_API pf_status pf_raster_write(const pf_raster* r, const char* path);
PF_API pf_status pf_raster_import_png(const char* path, pf_raster** out);
PF_API pf_status pf_raster_export_png(const pf_raster* r, const char* path);
/* CRC-32 (zlib polynomial) of the container payload bytes. */
PF_API pf_status pf_raster_crc32(const pf_raster* r, uint32_t* out);

/* --- preprocessing ------------------------------------------------------- */

/* method: "nearest" or "bilinear". */
PF_API pf_status pf_resample(const pf_raster* r, int width, int height,
                             const char* method, pf_raster** out);
PF_API pf_status pf_estimate_shift(const pf_raster* reference,
                                   const pf_raster* moving, int max_shift,
                                   int* dx, int* dy, double* score);
PF_API pf_status pf_apply_shift(const pf_raster* r, int dx, int dy,
                                pf_raster** out);
/* gains/offsets: one per band. */
PF_API pf_status pf_calibrate(const pf_raster* r, const double* gains,
                              const double* offsets, int count,
                              pf_raster** out);
PF_API pf_status pf_dos_correct(const pf_raster* r, double percentile,
                                pf_raster** out);
PF_API pf_status pf_to_intensity(const pf_raster* r, pf_raster** out);

/* --- fusion -------------------------------------------------------------- */

typedef struct pf_fusion_options {
  int levels;      /* wavelet levels; 0 = one per resolution octave */
  int pca_literal; /* nonzero: add pan to every PCA score plane */
  int match;       /* nonzero: moment-match pan before injection */
} pf_fusion_options;

PF_API void pf_fusion_options_default(pf_fusion_options* opts);

/* method: "brovey", "ihs", "pca" or "wavelet". opts NULL means defaults. */
PF_API pf_status pf_fuse(const pf_raster* ms, const pf_raster* pan, int ratio,
                         const char* method, const pf_fusion_options* opts,
                         pf_raster** out);
/* stages: comma-separated method names, applied left to right; each stage
 * re-fuses the previous output with the original pan. */
PF_API pf_status pf_fuse_cascade(const pf_raster* ms, const pf_raster* pan,
                                 int ratio, const char* stages,
                                 const pf_fusion_options* opts,
                                 pf_raster** out);

/* --- synthetic dataset --------------------------------------------------- */

PF_API pf_status pf_generate_scene(int side, int bands, int n_blobs,
                                   int n_shapes, uint64_t seed, double lo,
                                   double hi, pf_raster** out);
PF_API pf_status pf_simulate_pan(const pf_raster* gt, const double* weights,
                                 int count, pf_raster** out);
PF_API pf_status pf_wald_degrade(const pf_raster* gt, int ratio,
                                 pf_raster** out);

/* --- evaluation ---------------------------------------------------------- */

/* Scores fused against ground_truth (may be NULL: reduced-reference mode
 * against upsampled MS). weight_names/weight_values configure the quality
 * index; n_weights 0 means the default weighting. The report is returned as
 * a JSON string owned by the caller; release with pf_string_free. */
PF_API pf_status pf_evaluate(const pf_raster* fused, const pf_raster* ms,
                             const pf_raster* pan,
                             const pf_raster* ground_truth, int ratio,
                             const char* const* weight_names,
                             const double* weight_values, int n_weights,
                             char** out_json);

PF_API void pf_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* PANFUSE_H */
