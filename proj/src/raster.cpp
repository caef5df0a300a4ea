#include "panfuse/raster.hpp"

#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "panfuse/errors.hpp"

namespace panfuse {

namespace {

using nlohmann::json;

std::string count_mismatch(std::size_t expected, std::size_t got) {
  std::ostringstream os;
  os << "expected " << expected << " samples, got " << got;
  return os.str();
}

void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(std::uint8_t(v & 0xff));
  out.push_back(std::uint8_t((v >> 8) & 0xff));
  out.push_back(std::uint8_t((v >> 16) & 0xff));
  out.push_back(std::uint8_t((v >> 24) & 0xff));
}

void put_f64le(std::vector<std::uint8_t>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(std::uint8_t((bits >> (8 * i)) & 0xff));
}

double get_f64le(const std::uint8_t* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= std::uint64_t(p[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

[[noreturn]] void parse_fail(std::size_t byte_offset, const std::string& what) {
  std::ostringstream os;
  os << what << " at byte " << byte_offset;
  fail(ErrorCode::parse, os.str());
}

}  // namespace

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::io: return "i/o";
    case ErrorCode::parse: return "parse";
    case ErrorCode::degenerate_input: return "degenerate input";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::numeric: return "numeric";
    case ErrorCode::insufficient_data: return "insufficient data";
  }
  return "unknown";
}

Raster make_raster(int width, int height, int bands,
                   std::vector<double> samples) {
  if (width < 1 || height < 1 || bands < 1)
    fail(ErrorCode::invalid_argument, "raster dimensions must be >= 1");
  const std::size_t expected = std::size_t(width) * height * bands;
  if (samples.size() != expected)
    fail(ErrorCode::invalid_argument, count_mismatch(expected, samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (!std::isfinite(samples[i])) {
      std::ostringstream os;
      os << "non-finite sample at index " << i;
      fail(ErrorCode::invalid_argument, os.str());
    }
  Raster r;
  r.width = width;
  r.height = height;
  r.bands = bands;
  r.samples = std::move(samples);
  return r;
}

Raster make_raster_like(const Raster& src, int width, int height, int bands,
                        std::vector<double> samples) {
  Raster r = make_raster(width, height, bands, std::move(samples));
  r.nominal_range = src.nominal_range;
  if (bands == src.bands) r.band_names = src.band_names;
  return r;
}

Raster to_intensity(const Raster& r) {
  const std::size_t n = r.pixel_count();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int b = 0; b < r.bands; ++b) sum += r.samples[std::size_t(b) * n + i];
    out[i] = sum / double(r.bands);
  }
  Raster result = make_raster(r.width, r.height, 1, std::move(out));
  result.nominal_range = r.nominal_range;
  return result;
}

std::vector<std::uint8_t> payload_bytes(const Raster& r) {
  std::vector<std::uint8_t> out;
  out.reserve(r.sample_count() * 8);
  for (double v : r.samples) put_f64le(out, v);
  return out;
}

std::uint32_t payload_crc32(const Raster& r) {
  const auto bytes = payload_bytes(r);
  return std::uint32_t(
      ::crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()),
              uInt(bytes.size())));
}

void write_container(const Raster& r, const std::filesystem::path& path) {
  json header{{"width", r.width},
              {"height", r.height},
              {"bands", r.bands},
              {"dtype", "f64"},
              {"layout", "BSQ"},
              {"nominal_range", {r.nominal_range.first, r.nominal_range.second}}};
  if (!r.band_names.empty()) header["band_names"] = r.band_names;
  const std::string header_str = header.dump();

  std::vector<std::uint8_t> bytes;
  bytes.insert(bytes.end(), {'M', 'S', 'I', '1'});
  put_u32le(bytes, std::uint32_t(header_str.size()));
  bytes.insert(bytes.end(), header_str.begin(), header_str.end());
  const auto payload = payload_bytes(r);
  bytes.insert(bytes.end(), payload.begin(), payload.end());

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::io, "cannot open for writing: " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()),
          std::streamsize(bytes.size()));
  if (!f) fail(ErrorCode::io, "write failed: " + path.string());
}

Raster read_container(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::io, "cannot open for reading: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());

  if (bytes.size() < 4 || std::memcmp(bytes.data(), "MSI1", 4) != 0)
    parse_fail(0, "bad magic (expected \"MSI1\")");
  if (bytes.size() < 8) parse_fail(4, "truncated header length field");
  const std::uint32_t header_len = std::uint32_t(bytes[4]) |
                                   std::uint32_t(bytes[5]) << 8 |
                                   std::uint32_t(bytes[6]) << 16 |
                                   std::uint32_t(bytes[7]) << 24;
  const std::size_t payload_start = 8 + std::size_t(header_len);
  if (bytes.size() < payload_start) parse_fail(8, "truncated header");

  json header;
  try {
    header = json::parse(bytes.begin() + 8, bytes.begin() + payload_start);
  } catch (const json::exception& e) {
    parse_fail(8, std::string("invalid header JSON: ") + e.what());
  }
  if (!header.is_object()) parse_fail(8, "header is not a JSON object");
  for (const char* key : {"width", "height", "bands"})
    if (!header.contains(key) || !header[key].is_number_integer())
      parse_fail(8, std::string("header missing integer field \"") + key + "\"");
  const int width = header["width"].get<int>();
  const int height = header["height"].get<int>();
  const int bands = header["bands"].get<int>();
  if (width < 1 || height < 1 || bands < 1)
    parse_fail(8, "header dimensions must be >= 1");
  if (header.value("dtype", "") != "f64")
    parse_fail(8, "unsupported dtype (expected \"f64\")");
  if (header.value("layout", "") != "BSQ")
    parse_fail(8, "unsupported layout (expected \"BSQ\")");

  const std::size_t n = std::size_t(width) * height * bands;
  const std::size_t expected_payload = n * 8;
  const std::size_t actual_payload = bytes.size() - payload_start;
  if (actual_payload != expected_payload) {
    std::ostringstream os;
    os << (actual_payload < expected_payload ? "truncated payload"
                                             : "trailing data after payload")
       << " at byte " << payload_start << ": expected " << expected_payload
       << " payload bytes, got " << actual_payload;
    fail(ErrorCode::parse, os.str());
  }

  std::vector<double> samples(n);
  for (std::size_t i = 0; i < n; ++i) {
    samples[i] = get_f64le(bytes.data() + payload_start + i * 8);
    if (!std::isfinite(samples[i]))
      parse_fail(payload_start + i * 8, "non-finite sample");
  }

  Raster r = make_raster(width, height, bands, std::move(samples));
  if (header.contains("nominal_range")) {
    const auto& nr = header["nominal_range"];
    if (!nr.is_array() || nr.size() != 2 || !nr[0].is_number() ||
        !nr[1].is_number())
      parse_fail(8, "nominal_range must be a numeric pair");
    r.nominal_range = {nr[0].get<double>(), nr[1].get<double>()};
    if (!(r.nominal_range.first < r.nominal_range.second))
      parse_fail(8, "nominal_range lo must be < hi");
  }
  if (header.contains("band_names")) {
    const auto& names = header["band_names"];
    if (!names.is_array() || int(names.size()) != bands)
      parse_fail(8, "band_names length must equal bands");
    for (const auto& name : names)
      r.band_names.push_back(name.get<std::string>());
  }
  return r;
}

}  // namespace panfuse
