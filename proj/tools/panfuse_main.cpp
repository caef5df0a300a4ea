// Command-line front end: synthetic datasets, preprocessing, fusion,
// evaluation and benchmarking over .msi/.png rasters. Talks to the core
// exclusively through the C API.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "panfuse/panfuse.h"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

struct ExitError {
  int code;  // process exit code: 1 runtime, 2 usage
  std::string message;
};

[[noreturn]] void die(int code, const std::string& message) {
  throw ExitError{code, message};
}

const char* status_name(pf_status s) {
  switch (s) {
    case PF_OK: return "ok";
    case PF_ERROR_INVALID_ARGUMENT: return "invalid_argument";
    case PF_ERROR_IO: return "io";
    case PF_ERROR_PARSE: return "parse";
    case PF_ERROR_DEGENERATE_INPUT: return "degenerate_input";
    case PF_ERROR_UNSUPPORTED: return "unsupported";
    case PF_ERROR_NUMERIC: return "numeric";
    case PF_ERROR_INSUFFICIENT_DATA: return "insufficient_data";
    case PF_ERROR_INTERNAL: return "internal";
  }
  return "internal";
}

// Fails the command on a bad status. Argument-validation failures coming
// straight from flag values count as usage errors (exit 2) when
// usage_on_invalid is set; everything else is a runtime error (exit 1).
void check(pf_status s, bool usage_on_invalid = false) {
  if (s == PF_OK) return;
  const int code = (usage_on_invalid && s == PF_ERROR_INVALID_ARGUMENT) ? 2 : 1;
  die(code, pf_last_error());
}

struct Handle {
  pf_raster* p = nullptr;
  Handle() = default;
  explicit Handle(pf_raster* r) : p(r) {}
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  Handle(Handle&& o) noexcept : p(o.p) { o.p = nullptr; }
  Handle& operator=(Handle&& o) noexcept {
    if (this != &o) {
      pf_raster_free(p);
      p = o.p;
      o.p = nullptr;
    }
    return *this;
  }
  ~Handle() { pf_raster_free(p); }
  pf_raster** out() { return &p; }
  operator pf_raster*() const { return p; }
};

Handle read_raster(const std::string& path) {
  Handle h;
  check(pf_raster_read(path.c_str(), h.out()));
  return h;
}

void write_raster(const pf_raster* r, const std::string& path) {
  check(pf_raster_write(r, path.c_str()));
}

std::string crc_hex(const pf_raster* r) {
  uint32_t crc = 0;
  check(pf_raster_crc32(r, &crc));
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%08x", crc);
  return buf;
}

std::string fmt9(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::general, 9);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string token;
  while (std::getline(ss, token, sep)) parts.push_back(token);
  return parts;
}

std::vector<double> parse_doubles(const std::string& s, const char* flag) {
  std::vector<double> out;
  for (const std::string& tok : split(s, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      die(2, std::string(flag) + ": \"" + tok + "\" is not a number");
    }
  }
  return out;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) die(1, "cannot open " + path + " for writing");
  f << content;
  if (!f) die(1, "write failed: " + path);
}

// Canonical metric column order shared by eval tables and bench reports.
const std::pair<const char*, const char*> kColumns[] = {
    {"sam", "SAM"},   {"sid", "SID"},   {"scp", "SCP"},
    {"ssim", "SSIM"}, {"edge", "Edge"}, {"esr", "ESR"},
    {"ref", "REF"},   {"psnr", "PSNR"}, {"rmse", "RMSE"}};

// Raw metric value from a parsed report; empty when absent. psnr may be the
// string "inf".
std::string metric_cell(const nlohmann::json& report, const char* key) {
  if (!report.contains(key)) return "";
  const auto& v = report.at(key);
  if (v.is_string()) return v.get<std::string>();
  return fmt9(v.get<double>());
}

// --- synth ------------------------------------------------------------------

struct SynthArgs {
  int side = 128;
  int bands = 4;
  int blobs = 12;
  int shapes = 6;
  std::uint64_t seed = 0;
  int ratio = 2;
  std::vector<double> range{0.0, 255.0};
  std::string weights_csv;
  std::string out_dir;
};

int cmd_synth(const SynthArgs& a) {
  if (a.range.size() != 2) die(2, "--range needs exactly two values");
  Handle gt;
  check(pf_generate_scene(a.side, a.bands, a.blobs, a.shapes, a.seed,
                          a.range[0], a.range[1], gt.out()),
        /*usage_on_invalid=*/true);

  std::vector<double> weights;
  if (a.weights_csv.empty())
    weights.assign(a.bands, 1.0 / double(a.bands));
  else
    weights = parse_doubles(a.weights_csv, "--pan-weights");
  Handle pan;
  check(pf_simulate_pan(gt, weights.data(), int(weights.size()), pan.out()),
        /*usage_on_invalid=*/true);
  Handle ms_low;
  check(pf_wald_degrade(gt, a.ratio, ms_low.out()), /*usage_on_invalid=*/true);

  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  write_raster(gt, (dir / "ground_truth.msi").string());
  write_raster(ms_low, (dir / "ms_low.msi").string());
  write_raster(pan, (dir / "pan.msi").string());

  ordered_json manifest;
  manifest["spec"] = {{"side", a.side},
                      {"bands", a.bands},
                      {"n_blobs", a.blobs},
                      {"n_shapes", a.shapes},
                      {"seed", a.seed},
                      {"value_range", {a.range[0], a.range[1]}}};
  manifest["ratio"] = a.ratio;
  manifest["weights"] = weights;
  manifest["checksums"] = {{"ground_truth.msi", crc_hex(gt)},
                           {"ms_low.msi", crc_hex(ms_low)},
                           {"pan.msi", crc_hex(pan)}};
  const std::string manifest_path = (dir / "manifest.json").string();
  write_text(manifest_path, manifest.dump(2) + "\n");
  std::cout << manifest_path << "\n";
  return 0;
}

// --- preprocess -------------------------------------------------------------

struct PreprocessArgs {
  std::string in, out;
  std::string gains_csv, offsets_csv;
  double dos_percentile = -1.0;  // < 0: skip
  std::string align_to;
  int max_shift = 8;
};

int cmd_preprocess(const PreprocessArgs& a) {
  Handle current = read_raster(a.in);
  const std::string input_crc = crc_hex(current);
  ordered_json stages = ordered_json::array();

  if (!a.gains_csv.empty() || !a.offsets_csv.empty()) {
    const int bands = pf_raster_bands(current);
    std::vector<double> gains(bands, 1.0), offsets(bands, 0.0);
    if (!a.gains_csv.empty()) gains = parse_doubles(a.gains_csv, "--gains");
    if (!a.offsets_csv.empty())
      offsets = parse_doubles(a.offsets_csv, "--offsets");
    Handle next;
    check(pf_calibrate(current, gains.data(), offsets.data(),
                       int(std::max(gains.size(), offsets.size())), next.out()));
    current = std::move(next);
    stages.push_back(
        {{"stage", "calibrate"}, {"gains", gains}, {"offsets", offsets}});
  }

  if (a.dos_percentile >= 0.0) {
    Handle next;
    check(pf_dos_correct(current, a.dos_percentile, next.out()));
    current = std::move(next);
    stages.push_back({{"stage", "dos"}, {"percentile", a.dos_percentile}});
  }

  if (!a.align_to.empty()) {
    Handle reference = read_raster(a.align_to);
    Handle ref_i, cur_i;
    check(pf_to_intensity(reference, ref_i.out()));
    check(pf_to_intensity(current, cur_i.out()));
    int dx = 0, dy = 0;
    double score = 0.0;
    check(pf_estimate_shift(ref_i, cur_i, a.max_shift, &dx, &dy, &score));
    Handle next;
    check(pf_apply_shift(current, dx, dy, next.out()));
    current = std::move(next);
    stages.push_back({{"stage", "align"},
                      {"dx", dx},
                      {"dy", dy},
                      {"score", score},
                      {"reference", a.align_to}});
  }

  write_raster(current, a.out);
  ordered_json sidecar;
  sidecar["input"] = {{"path", a.in}, {"crc32", input_crc}};
  sidecar["output"] = {{"path", a.out}, {"crc32", crc_hex(current)}};
  sidecar["stages"] = stages;
  write_text(a.out + ".json", sidecar.dump(2) + "\n");
  std::cout << a.out << "\n";
  return 0;
}

// --- fuse -------------------------------------------------------------------

struct FuseArgs {
  std::string ms, pan, method, out;
  int ratio = 0;  // 0: derive from dimensions
  int levels = 0;
  std::string pca_mode = "substitute";
  bool no_match = false;
  std::string cascade_stages;
};

// Upsamples ms to the pan grid when needed and pins down the scale ratio.
// Dimension mismatches that are not an integer factor are usage errors.
Handle prepare_ms(const Handle& ms, const Handle& pan, int requested_ratio,
                  int* ratio_out) {
  const int mw = pf_raster_width(ms), mh = pf_raster_height(ms);
  const int pw = pf_raster_width(pan), ph = pf_raster_height(pan);
  int ratio = requested_ratio;
  if (mw == pw && mh == ph) {
    if (ratio == 0) ratio = 1;
  } else {
    if (pw % mw != 0 || ph % mh != 0 || pw / mw != ph / mh)
      die(2, "MS dims " + std::to_string(mw) + "x" + std::to_string(mh) +
                 " do not divide pan dims " + std::to_string(pw) + "x" +
                 std::to_string(ph) + " by one integer factor");
    const int derived = pw / mw;
    if (ratio == 0) ratio = derived;
    if (ratio != derived)
      die(2, "--ratio " + std::to_string(ratio) +
                 " contradicts the dimension factor " + std::to_string(derived));
  }
  *ratio_out = ratio;
  Handle up;  // resample is an identity copy when dims already agree
  check(pf_resample(ms, pw, ph, "bilinear", up.out()));
  return up;
}

int cmd_fuse(const FuseArgs& a) {
  if (a.method != "cascade" && !a.cascade_stages.empty())
    die(2, "--cascade-stages requires --method cascade");
  if (a.method == "cascade" && a.cascade_stages.empty())
    die(2, "--method cascade needs --cascade-stages");
  if (a.pca_mode != "substitute" && a.pca_mode != "literal")
    die(2, "--pca-mode must be substitute or literal");

  Handle ms = read_raster(a.ms);
  Handle pan = read_raster(a.pan);
  const std::string ms_crc = crc_hex(ms);
  const std::string pan_crc = crc_hex(pan);

  int ratio = 0;
  Handle ms_up = prepare_ms(ms, pan, a.ratio, &ratio);

  pf_fusion_options opts;
  pf_fusion_options_default(&opts);
  opts.levels = a.levels;
  opts.pca_literal = a.pca_mode == "literal" ? 1 : 0;
  opts.match = a.no_match ? 0 : 1;

  Handle fused;
  if (a.method == "cascade")
    check(pf_fuse_cascade(ms_up, pan, ratio, a.cascade_stages.c_str(), &opts,
                          fused.out()));
  else
    check(pf_fuse(ms_up, pan, ratio, a.method.c_str(), &opts, fused.out()));

  write_raster(fused, a.out);

  ordered_json sidecar;
  sidecar["method"] = a.method;
  if (a.method == "cascade") sidecar["stages"] = a.cascade_stages;
  sidecar["options"] = {{"levels", a.levels},
                        {"pca_mode", a.pca_mode},
                        {"match", !a.no_match}};
  sidecar["ratio"] = ratio;
  sidecar["inputs"] = {{"ms", {{"path", a.ms}, {"crc32", ms_crc}}},
                       {"pan", {{"path", a.pan}, {"crc32", pan_crc}}}};
  sidecar["output"] = {{"path", a.out}, {"crc32", crc_hex(fused)}};
  write_text(a.out + ".json", sidecar.dump(2) + "\n");
  std::cout << a.out << "\n";
  return 0;
}

// --- eval -------------------------------------------------------------------

struct EvalArgs {
  std::string fused, ms, pan, ground_truth;
  int ratio = 0;
  std::string weights_csv;
};

void parse_weight_list(const std::string& csv, std::vector<std::string>* names,
                       std::vector<double>* values) {
  for (const std::string& tok : split(csv, ',')) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0)
      die(2, "--weights entries must look like name=value (got \"" + tok +
                 "\")");
    names->push_back(tok.substr(0, eq));
    const std::string v = tok.substr(eq + 1);
    try {
      std::size_t used = 0;
      values->push_back(std::stod(v, &used));
      if (used != v.size()) throw std::invalid_argument(v);
    } catch (const std::exception&) {
      die(2, "--weights: \"" + v + "\" is not a number");
    }
  }
}

std::string evaluate_to_json(const pf_raster* fused, const pf_raster* ms,
                             const pf_raster* pan, const pf_raster* gt,
                             int ratio, const std::string& weights_csv) {
  std::vector<std::string> names;
  std::vector<double> values;
  if (!weights_csv.empty()) parse_weight_list(weights_csv, &names, &values);
  std::vector<const char*> name_ptrs;
  name_ptrs.reserve(names.size());
  for (const auto& n : names) name_ptrs.push_back(n.c_str());

  char* json = nullptr;
  check(pf_evaluate(fused, ms, pan, gt, ratio,
                    name_ptrs.empty() ? nullptr : name_ptrs.data(),
                    values.empty() ? nullptr : values.data(),
                    int(name_ptrs.size()), &json));
  std::string out(json);
  pf_string_free(json);
  return out;
}

int cmd_eval(const EvalArgs& a) {
  Handle fused = read_raster(a.fused);
  Handle ms = read_raster(a.ms);
  Handle pan = read_raster(a.pan);
  Handle gt;
  if (!a.ground_truth.empty()) gt = read_raster(a.ground_truth);

  const std::string json_text = evaluate_to_json(
      fused, ms, pan, a.ground_truth.empty() ? nullptr : gt.p, a.ratio,
      a.weights_csv);
  std::cout << json_text << "\n";

  const nlohmann::json report = nlohmann::json::parse(json_text);
  std::cout << "Metric,Value\n";
  for (const auto& [key, label] : kColumns) {
    const std::string cell = metric_cell(report, key);
    if (!cell.empty()) std::cout << label << "," << cell << "\n";
  }
  std::cout << "QualityIndex," << fmt9(report.at("quality_index").get<double>())
            << "\n";
  return 0;
}

// --- bench ------------------------------------------------------------------

struct BenchArgs {
  std::string ms, pan, ground_truth, out;
  int ratio = 0;
  std::string methods_csv = "brovey,pca,ihs,wavelet";
  std::string format = "csv";
  std::string weights_csv;
};

struct BenchRow {
  std::string method;
  bool failed = false;
  std::string error_code;   // status name when failed
  std::string error_detail;
  nlohmann::json report;    // parsed evaluation report when not failed
  double wall_time = 0.0;   // seconds spent in the fusion call
};

BenchRow run_bench_method(const std::string& token, const Handle& ms_up,
                          const Handle& pan, const Handle& gt,
                          const Handle& ms_orig, int ratio,
                          const std::string& weights_csv) {
  BenchRow row;
  row.method = token;

  pf_fusion_options opts;
  pf_fusion_options_default(&opts);

  Handle fused;
  pf_status s;
  const auto start = std::chrono::steady_clock::now();
  if (token.rfind("cascade:", 0) == 0) {
    std::string stages = token.substr(8);
    std::replace(stages.begin(), stages.end(), '+', ',');
    s = pf_fuse_cascade(ms_up, pan, ratio, stages.c_str(), &opts, fused.out());
  } else {
    s = pf_fuse(ms_up, pan, ratio, token.c_str(), &opts, fused.out());
  }
  row.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  if (s != PF_OK) {
    row.failed = true;
    row.error_code = status_name(s);
    row.error_detail = pf_last_error();
    return row;
  }

  try {
    const std::string json_text =
        evaluate_to_json(fused, ms_orig, pan, gt, ratio, weights_csv);
    row.report = nlohmann::json::parse(json_text);
  } catch (const ExitError& e) {
    row.failed = true;
    row.error_code = "evaluation_failed";
    row.error_detail = e.message;
  }
  return row;
}

constexpr const char* kBenchHeader =
    "Method,SAM,SID,SCP,SSIM,Edge,ESR,REF,PSNR,RMSE,QualityIndex,WallTimeSec";

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << kBenchHeader << "\n";
  for (const BenchRow& row : rows) {
    os << row.method;
    if (row.failed) {
      os << ",error:" << row.error_code;
      for (int i = 0; i < 10; ++i) os << ",";
    } else {
      for (const auto& [key, label] : kColumns)
        os << "," << metric_cell(row.report, key);
      os << "," << fmt9(row.report.at("quality_index").get<double>());
      os << "," << fmt9(row.wall_time);
    }
    os << "\n";
  }
  return os.str();
}

std::string bench_md(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << "| Method | SAM | SID | SCP | SSIM | Edge | ESR | REF | PSNR | RMSE "
        "| QualityIndex | WallTimeSec |\n";
  os << "| --- | --- | --- | --- | --- | --- | --- | --- | --- | --- | --- "
        "| --- |\n";
  for (const BenchRow& row : rows) {
    os << "| " << row.method << " ";
    if (row.failed) {
      os << "| error:" << row.error_code << " ";
      for (int i = 0; i < 10; ++i) os << "| ";
    } else {
      for (const auto& [key, label] : kColumns)
        os << "| " << metric_cell(row.report, key) << " ";
      os << "| " << fmt9(row.report.at("quality_index").get<double>()) << " ";
      os << "| " << fmt9(row.wall_time) << " ";
    }
    os << "|\n";
  }
  return os.str();
}

std::string bench_json(const std::vector<BenchRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const BenchRow& row : rows) {
    ordered_json obj;
    obj["method"] = row.method;
    if (row.failed) {
      obj["error"] = row.error_code;
      obj["message"] = row.error_detail;
    } else {
      obj["report"] = row.report;
      obj["wall_time_sec"] = row.wall_time;
    }
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

int cmd_bench(const BenchArgs& a) {
  if (a.format != "csv" && a.format != "json" && a.format != "md")
    die(2, "--format must be csv, json or md");

  Handle ms = read_raster(a.ms);
  Handle pan = read_raster(a.pan);
  Handle gt = read_raster(a.ground_truth);

  int ratio = 0;
  Handle ms_up = prepare_ms(ms, pan, a.ratio, &ratio);

  std::vector<BenchRow> rows;
  for (const std::string& token : split(a.methods_csv, ','))
    rows.push_back(
        run_bench_method(token, ms_up, pan, gt, ms, ratio, a.weights_csv));

  std::string content;
  if (a.format == "csv")
    content = bench_csv(rows);
  else if (a.format == "md")
    content = bench_md(rows);
  else
    content = bench_json(rows);
  write_text(a.out, content);
  std::cout << a.out << "\n";

  const bool all_failed =
      !rows.empty() &&
      std::all_of(rows.begin(), rows.end(),
                  [](const BenchRow& r) { return r.failed; });
  return all_failed ? 1 : 0;
}

// --- convert ----------------------------------------------------------------

struct ConvertArgs {
  std::string in, out;
};

std::string lower_ext(const std::string& path) {
  std::string ext = fs::path(path).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return char(std::tolower(c)); });
  return ext;
}

int cmd_convert(const ConvertArgs& a) {
  const std::string from = lower_ext(a.in), to = lower_ext(a.out);
  if (from == ".png" && to == ".msi") {
    Handle r;
    check(pf_raster_import_png(a.in.c_str(), r.out()));
    write_raster(r, a.out);
  } else if (from == ".msi" && to == ".png") {
    Handle r = read_raster(a.in);
    check(pf_raster_export_png(r, a.out.c_str()));
  } else {
    die(2, "convert supports .png -> .msi and .msi -> .png (got \"" + from +
               "\" -> \"" + to + "\")");
  }
  std::cout << a.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pan-sharpening toolkit: synthesize, preprocess, fuse, "
               "evaluate and benchmark multiband rasters"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pf_version()));

  SynthArgs synth;
  auto* synth_cmd =
      app.add_subcommand("synth", "generate a synthetic evaluation triple");
  synth_cmd->add_option("--side", synth.side, "scene side (power of two)")
      ->capture_default_str();
  synth_cmd->add_option("--bands", synth.bands, "band count")
      ->capture_default_str();
  synth_cmd->add_option("--blobs", synth.blobs, "number of Gaussian blobs")
      ->capture_default_str();
  synth_cmd->add_option("--shapes", synth.shapes, "number of hard-edged shapes")
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "generator seed")
      ->capture_default_str();
  synth_cmd->add_option("--ratio", synth.ratio, "degradation ratio")
      ->capture_default_str();
  synth_cmd->add_option("--range", synth.range, "value range lo hi")
      ->expected(2);
  synth_cmd->add_option("--pan-weights", synth.weights_csv,
                        "comma-separated per-band pan weights");
  synth_cmd->add_option("--out-dir", synth.out_dir, "output directory")
      ->required();

  PreprocessArgs pre;
  auto* pre_cmd = app.add_subcommand(
      "preprocess", "calibration, dark-object subtraction, alignment");
  pre_cmd->add_option("--in", pre.in, "input raster (.msi)")->required();
  pre_cmd->add_option("--out", pre.out, "output raster (.msi)")->required();
  pre_cmd->add_option("--gains", pre.gains_csv, "per-band gains");
  pre_cmd->add_option("--offsets", pre.offsets_csv, "per-band offsets");
  pre_cmd->add_option("--dos-percentile", pre.dos_percentile,
                      "dark-object percentile in [0, 0.5]");
  pre_cmd->add_option("--align-to", pre.align_to,
                      "reference raster for shift alignment");
  pre_cmd->add_option("--max-shift", pre.max_shift, "alignment search radius")
      ->capture_default_str();

  FuseArgs fuse;
  auto* fuse_cmd = app.add_subcommand("fuse", "pan-sharpen an MS/pan pair");
  fuse_cmd->add_option("--ms", fuse.ms, "multispectral raster")->required();
  fuse_cmd->add_option("--pan", fuse.pan, "panchromatic raster")->required();
  fuse_cmd
      ->add_option("--method", fuse.method,
                   "brovey | ihs | pca | wavelet | cascade")
      ->required();
  fuse_cmd->add_option("--out", fuse.out, "output raster (.msi)")->required();
  fuse_cmd->add_option("--ratio", fuse.ratio,
                       "scale ratio (default: from dimensions)");
  fuse_cmd->add_option("--levels", fuse.levels,
                       "wavelet levels (0 = one per octave)");
  fuse_cmd->add_option("--pca-mode", fuse.pca_mode, "substitute | literal")
      ->capture_default_str();
  fuse_cmd->add_flag("--no-match", fuse.no_match,
                     "skip moment matching of the pan image");
  fuse_cmd->add_option("--cascade-stages", fuse.cascade_stages,
                       "comma-separated stages for --method cascade");

  EvalArgs eval;
  auto* eval_cmd =
      app.add_subcommand("eval", "score a fused raster against references");
  eval_cmd->add_option("--fused", eval.fused, "fused raster")->required();
  eval_cmd->add_option("--ms", eval.ms, "original (low-res) MS raster")
      ->required();
  eval_cmd->add_option("--pan", eval.pan, "panchromatic raster")->required();
  eval_cmd->add_option("--ground-truth", eval.ground_truth,
                       "high-res reference (omit for reduced-reference mode)");
  eval_cmd->add_option("--ratio", eval.ratio, "scale ratio")->required();
  eval_cmd->add_option("--weights", eval.weights_csv,
                       "quality-index weights, name=value,...");

  BenchArgs bench;
  auto* bench_cmd =
      app.add_subcommand("bench", "run and score several fusion methods");
  bench_cmd->add_option("--ms", bench.ms, "multispectral raster")->required();
  bench_cmd->add_option("--pan", bench.pan, "panchromatic raster")->required();
  bench_cmd->add_option("--ground-truth", bench.ground_truth,
                        "high-res reference raster")
      ->required();
  bench_cmd->add_option("--ratio", bench.ratio,
                        "scale ratio (default: from dimensions)");
  bench_cmd
      ->add_option("--methods", bench.methods_csv,
                   "comma-separated methods; cascade:a+b chains stages")
      ->capture_default_str();
  bench_cmd->add_option("--format", bench.format, "csv | json | md")
      ->capture_default_str();
  bench_cmd->add_option("--weights", bench.weights_csv,
                        "quality-index weights, name=value,...");
  bench_cmd->add_option("--out", bench.out, "report file")->required();

  ConvertArgs convert;
  auto* convert_cmd =
      app.add_subcommand("convert", "convert between .msi and .png");
  convert_cmd->add_option("--in", convert.in, "input file")->required();
  convert_cmd->add_option("--out", convert.out, "output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message
    return 2;
  }

  try {
    if (synth_cmd->parsed()) return cmd_synth(synth);
    if (pre_cmd->parsed()) return cmd_preprocess(pre);
    if (fuse_cmd->parsed()) return cmd_fuse(fuse);
    if (eval_cmd->parsed()) return cmd_eval(eval);
    if (bench_cmd->parsed()) return cmd_bench(bench);
    if (convert_cmd->parsed()) return cmd_convert(convert);
  } catch (const ExitError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
