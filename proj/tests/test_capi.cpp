#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "panfuse/panfuse.h"

extern "C" int capi_smoke_roundtrip(void);

namespace {

std::string test_dir() {
  static const std::string dir = [] {
    char tmpl[] = "/tmp/panfuse_capi_XXXXXX";
    const char* d = mkdtemp(tmpl);
    REQUIRE(d != nullptr);
    return std::string(d);
  }();
  return dir;
}

// Owning wrapper so failures don't leak handles.
struct Handle {
  pf_raster* p = nullptr;
  ~Handle() { pf_raster_free(p); }
  pf_raster** out() { return &p; }
};

void make_triple(Handle& gt, Handle& ms, Handle& pan, int bands,
                 uint64_t seed) {
  REQUIRE(pf_generate_scene(32, bands, 8, 4, seed, 0.0, 255.0, gt.out()) ==
          PF_OK);
  REQUIRE(pf_wald_degrade(gt.p, 2, ms.out()) == PF_OK);
  const std::vector<double> w(bands, 1.0);
  REQUIRE(pf_simulate_pan(gt.p, w.data(), bands, pan.out()) == PF_OK);
}

}  // namespace

TEST_CASE("the pure-C translation unit drives the API") {
  CHECK(capi_smoke_roundtrip() == 0);
}

TEST_CASE("version string is present") {
  const std::string v = pf_version();
  CHECK_FALSE(v.empty());
  CHECK(v.find('.') != std::string::npos);
}

TEST_CASE("raster lifecycle and accessors") {
  const double samples[6] = {1, 2, 3, 4, 5, 6};
  Handle r;
  REQUIRE(pf_raster_create(3, 1, 2, samples, r.out()) == PF_OK);
  CHECK(pf_raster_width(r.p) == 3);
  CHECK(pf_raster_height(r.p) == 1);
  CHECK(pf_raster_bands(r.p) == 2);
  const double* back = pf_raster_samples(r.p);
  REQUIRE(back != nullptr);
  for (int i = 0; i < 6; ++i) CHECK(back[i] == samples[i]);

  CHECK(pf_raster_width(nullptr) == 0);
  CHECK(pf_raster_samples(nullptr) == nullptr);
  pf_raster_free(nullptr);  // must be a no-op
}

TEST_CASE("raster creation rejects bad arguments with messages") {
  const double samples[4] = {1, 2, 3, 4};
  pf_raster* out = nullptr;
  CHECK(pf_raster_create(2, 2, 1, samples, nullptr) ==
        PF_ERROR_INVALID_ARGUMENT);
  CHECK(pf_raster_create(2, 2, 1, nullptr, &out) ==
        PF_ERROR_INVALID_ARGUMENT);
  CHECK(pf_raster_create(0, 2, 1, samples, &out) ==
        PF_ERROR_INVALID_ARGUMENT);
  const double bad[4] = {1, std::nan(""), 3, 4};
  CHECK(pf_raster_create(2, 2, 1, bad, &out) == PF_ERROR_INVALID_ARGUMENT);
  CHECK(std::string(pf_last_error()).empty() == false);
}

TEST_CASE("nominal range get and set") {
  const double samples[4] = {1, 2, 3, 4};
  Handle r;
  REQUIRE(pf_raster_create(2, 2, 1, samples, r.out()) == PF_OK);
  double lo = -1, hi = -1;
  REQUIRE(pf_raster_get_range(r.p, &lo, &hi) == PF_OK);
  CHECK(lo == 0.0);
  CHECK(hi == 255.0);
  REQUIRE(pf_raster_set_range(r.p, 0.0, 1023.0) == PF_OK);
  REQUIRE(pf_raster_get_range(r.p, &lo, &hi) == PF_OK);
  CHECK(hi == 1023.0);
  CHECK(pf_raster_set_range(r.p, 5.0, 5.0) == PF_ERROR_INVALID_ARGUMENT);
  CHECK(pf_raster_get_range(r.p, nullptr, &hi) == PF_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("container IO round trip and checksums") {
  Handle gt;
  REQUIRE(pf_generate_scene(32, 3, 6, 3, 11, 0.0, 255.0, gt.out()) == PF_OK);
  const std::string path = test_dir() + "/roundtrip.msi";
  REQUIRE(pf_raster_write(gt.p, path.c_str()) == PF_OK);

  Handle back;
  REQUIRE(pf_raster_read(path.c_str(), back.out()) == PF_OK);
  REQUIRE(pf_raster_bands(back.p) == 3);
  const double* a = pf_raster_samples(gt.p);
  const double* b = pf_raster_samples(back.p);
  const size_t n = size_t(32) * 32 * 3;
  for (size_t i = 0; i < n; ++i) REQUIRE(a[i] == b[i]);

  uint32_t crc1 = 0, crc2 = 0;
  REQUIRE(pf_raster_crc32(gt.p, &crc1) == PF_OK);
  REQUIRE(pf_raster_crc32(back.p, &crc2) == PF_OK);
  CHECK(crc1 == crc2);

  Handle missing;
  CHECK(pf_raster_read((test_dir() + "/absent.msi").c_str(), missing.out()) ==
        PF_ERROR_IO);

  const std::string garbage = test_dir() + "/garbage.msi";
  std::FILE* f = std::fopen(garbage.c_str(), "wb");
  REQUIRE(f != nullptr);
  std::fputs("not a container", f);
  std::fclose(f);
  Handle bad;
  CHECK(pf_raster_read(garbage.c_str(), bad.out()) == PF_ERROR_PARSE);
  CHECK(std::string(pf_last_error()).find("magic") != std::string::npos);
}

TEST_CASE("png export and import") {
  const double samples[9] = {0, 32, 64, 96, 128, 160, 192, 224, 255};
  Handle gray;
  REQUIRE(pf_raster_create(3, 3, 1, samples, gray.out()) == PF_OK);
  const std::string path = test_dir() + "/gray.png";
  REQUIRE(pf_raster_export_png(gray.p, path.c_str()) == PF_OK);
  Handle back;
  REQUIRE(pf_raster_import_png(path.c_str(), back.out()) == PF_OK);
  const double* b = pf_raster_samples(back.p);
  for (int i = 0; i < 9; ++i) CHECK(b[i] == samples[i]);

  const double two[8] = {1, 2, 3, 4, 5, 6, 7, 8};
  Handle r2;
  REQUIRE(pf_raster_create(2, 2, 2, two, r2.out()) == PF_OK);
  CHECK(pf_raster_export_png(r2.p, (test_dir() + "/two.png").c_str()) ==
        PF_ERROR_UNSUPPORTED);
}

TEST_CASE("resample through the API") {
  const double samples[4] = {1, 2, 3, 4};
  Handle src, up, bad;
  REQUIRE(pf_raster_create(2, 2, 1, samples, src.out()) == PF_OK);
  REQUIRE(pf_resample(src.p, 4, 4, "nearest", up.out()) == PF_OK);
  const double* u = pf_raster_samples(up.p);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x)
      CHECK(u[y * 4 + x] == samples[(y / 2) * 2 + (x / 2)]);
  CHECK(pf_resample(src.p, 4, 4, "bicubic", bad.out()) ==
        PF_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("shift estimation and application through the API") {
  Handle gt, intensity;
  REQUIRE(pf_generate_scene(32, 3, 8, 4, 3, 0.0, 255.0, gt.out()) == PF_OK);
  REQUIRE(pf_to_intensity(gt.p, intensity.out()) == PF_OK);
  Handle moved;
  REQUIRE(pf_apply_shift(intensity.p, -1, -2, moved.out()) == PF_OK);
  int dx = 0, dy = 0;
  double score = 0.0;
  REQUIRE(pf_estimate_shift(intensity.p, moved.p, 3, &dx, &dy, &score) ==
          PF_OK);
  CHECK(dx == 1);
  CHECK(dy == 2);
  CHECK(score > 0.99);
}

TEST_CASE("calibration and dark-object subtraction through the API") {
  const double samples[4] = {10, 11, 12, 13};
  Handle r, cal, dos;
  REQUIRE(pf_raster_create(4, 1, 1, samples, r.out()) == PF_OK);
  const double gain = 2.0, offset = 1.0;
  REQUIRE(pf_calibrate(r.p, &gain, &offset, 1, cal.out()) == PF_OK);
  CHECK(pf_raster_samples(cal.p)[0] == 21.0);

  REQUIRE(pf_dos_correct(r.p, 0.0, dos.out()) == PF_OK);
  CHECK(pf_raster_samples(dos.p)[0] == 0.0);
  CHECK(pf_raster_samples(dos.p)[3] == 3.0);

  Handle bad;
  const double gains2[2] = {1, 1};
  CHECK(pf_calibrate(r.p, gains2, gains2, 2, bad.out()) ==
        PF_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("fusion options defaults") {
  pf_fusion_options opts;
  pf_fusion_options_default(&opts);
  CHECK(opts.levels == 0);
  CHECK(opts.pca_literal == 0);
  CHECK(opts.match == 1);
}

TEST_CASE("single-method fusion through the API") {
  Handle gt, ms, pan, ms_up, fused;
  make_triple(gt, ms, pan, 3, 21);
  REQUIRE(pf_resample(ms.p, 32, 32, "bilinear", ms_up.out()) == PF_OK);
  REQUIRE(pf_fuse(ms_up.p, pan.p, 2, "brovey", nullptr, fused.out()) == PF_OK);
  CHECK(pf_raster_width(fused.p) == 32);
  CHECK(pf_raster_bands(fused.p) == 3);

  Handle bad;
  CHECK(pf_fuse(ms_up.p, pan.p, 2, "sparkle", nullptr, bad.out()) ==
        PF_ERROR_INVALID_ARGUMENT);
  CHECK(pf_fuse(nullptr, pan.p, 2, "brovey", nullptr, bad.out()) ==
        PF_ERROR_INVALID_ARGUMENT);
  CHECK(pf_fuse(ms_up.p, pan.p, 2, "brovey,ihs", nullptr, bad.out()) ==
        PF_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("ihs through the API enforces the band count") {
  Handle gt, ms, pan, ms_up, bad;
  make_triple(gt, ms, pan, 4, 22);
  REQUIRE(pf_resample(ms.p, 32, 32, "bilinear", ms_up.out()) == PF_OK);
  CHECK(pf_fuse(ms_up.p, pan.p, 2, "ihs", nullptr, bad.out()) ==
        PF_ERROR_UNSUPPORTED);
  CHECK(std::string(pf_last_error()).find("3") != std::string::npos);
}

TEST_CASE("cascade equals manual stage composition") {
  Handle gt, ms, pan, ms_up;
  make_triple(gt, ms, pan, 3, 23);
  REQUIRE(pf_resample(ms.p, 32, 32, "bilinear", ms_up.out()) == PF_OK);

  Handle casc;
  REQUIRE(pf_fuse_cascade(ms_up.p, pan.p, 2, " brovey , wavelet ", nullptr,
                          casc.out()) == PF_OK);
  Handle stage1, stage2;
  REQUIRE(pf_fuse(ms_up.p, pan.p, 2, "brovey", nullptr, stage1.out()) ==
          PF_OK);
  REQUIRE(pf_fuse(stage1.p, pan.p, 2, "wavelet", nullptr, stage2.out()) ==
          PF_OK);
  const double* a = pf_raster_samples(casc.p);
  const double* b = pf_raster_samples(stage2.p);
  for (size_t i = 0; i < size_t(32) * 32 * 3; ++i) REQUIRE(a[i] == b[i]);

  Handle bad;
  CHECK(pf_fuse_cascade(ms_up.p, pan.p, 2, "", nullptr, bad.out()) ==
        PF_ERROR_INVALID_ARGUMENT);
  CHECK(pf_fuse_cascade(ms_up.p, pan.p, 2, "brovey,,pca", nullptr,
                        bad.out()) == PF_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("evaluation returns a parseable JSON report") {
  Handle gt, ms, pan, ms_up, fused;
  make_triple(gt, ms, pan, 3, 24);
  REQUIRE(pf_resample(ms.p, 32, 32, "bilinear", ms_up.out()) == PF_OK);
  REQUIRE(pf_fuse(ms_up.p, pan.p, 2, "pca", nullptr, fused.out()) == PF_OK);

  char* json = nullptr;
  REQUIRE(pf_evaluate(fused.p, ms.p, pan.p, gt.p, 2, nullptr, nullptr, 0,
                      &json) == PF_OK);
  REQUIRE(json != nullptr);
  {
    const nlohmann::json j = nlohmann::json::parse(json);
    CHECK(j.at("reduced_reference").get<bool>() == false);
    const double qi = j.at("quality_index").get<double>();
    CHECK(qi >= 0.0);
    CHECK(qi <= 1.0);
    CHECK(j.contains("sam"));
    CHECK(j.contains("ref"));
  }
  pf_string_free(json);
  json = nullptr;

  // Reduced-reference mode plus a custom single-metric weighting.
  const char* names[1] = {"ssim"};
  const double values[1] = {1.0};
  REQUIRE(pf_evaluate(fused.p, ms.p, pan.p, nullptr, 2, names, values, 1,
                      &json) == PF_OK);
  {
    const nlohmann::json j = nlohmann::json::parse(json);
    CHECK(j.at("reduced_reference").get<bool>() == true);
    CHECK(j.at("weights").at("ssim").get<double>() == doctest::Approx(1.0));
    CHECK_FALSE(j.at("notes").empty());
  }
  pf_string_free(json);

  CHECK(pf_evaluate(fused.p, ms.p, pan.p, gt.p, 2, nullptr, nullptr, 0,
                    nullptr) == PF_ERROR_INVALID_ARGUMENT);
  CHECK(pf_evaluate(fused.p, ms.p, pan.p, gt.p, 2, nullptr, nullptr, 2,
                    &json) == PF_ERROR_INVALID_ARGUMENT);
}
