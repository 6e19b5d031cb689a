// Copyright 2026 The PASTA Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pasta/tensor_io.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "byte_io.hpp"
#include "pasta/error.hpp"

namespace fs = std::filesystem;

namespace pasta {
namespace {

constexpr std::string_view kGridMagic = "PASTAFV1";
constexpr std::size_t kGridHeaderBytes = 20;

std::string describe(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!fs::exists(path)) fail(ErrorCode::kMissingFile, "no such file " + describe(path));
    fail(ErrorCode::kIo, "cannot open " + describe(path));
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorCode::kIo, "read failed on " + describe(path));
  return bytes;
}

void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIo, "cannot open " + describe(tmp) + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) fail(ErrorCode::kIo, "write failed on " + describe(tmp));
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorCode::kIo, "cannot rename onto " + describe(path));
  }
}

void write_text_atomic(const fs::path& path, std::string_view text) {
  write_file_atomic(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

// ---------------------------------------------------------------------------
// Feature grids

void FeatureGrid::validate() const {
  if (rows == 0 || cols == 0 || dim == 0) {
    fail(ErrorCode::kBadDims, "feature grid dimensions must be positive");
  }
  if (data.size() != patch_count() * dim) {
    fail(ErrorCode::kBadDims, "feature grid payload size does not match header");
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) {
      fail(ErrorCode::kNonFinite,
           "non-finite feature value at element " + std::to_string(i));
    }
  }
}

std::vector<std::uint8_t> encode_feature_grid(const FeatureGrid& grid) {
  grid.validate();
  detail::ByteWriter w;
  w.put_bytes(kGridMagic);
  w.put_u32(grid.rows);
  w.put_u32(grid.cols);
  w.put_u32(grid.dim);
  for (float v : grid.data) w.put_f32(v);
  return w.take();
}

namespace {

GridHeader decode_grid_header(detail::ByteReader& r) {
  if (r.remaining() < kGridMagic.size() ||
      r.take_bytes(kGridMagic.size()) != kGridMagic) {
    fail(ErrorCode::kBadMagic, "feature grid does not start with PASTAFV1");
  }
  GridHeader h;
  h.rows = r.u32();
  h.cols = r.u32();
  h.dim = r.u32();
  if (h.rows == 0 || h.cols == 0 || h.dim == 0) {
    fail(ErrorCode::kBadDims, "feature grid header has a zero dimension");
  }
  return h;
}

}  // namespace

FeatureGrid decode_feature_grid(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes, ErrorCode::kTruncated);
  const GridHeader h = decode_grid_header(r);
  FeatureGrid grid;
  grid.rows = h.rows;
  grid.cols = h.cols;
  grid.dim = h.dim;
  const std::uint64_t count = static_cast<std::uint64_t>(h.rows) * h.cols * h.dim;
  if (r.remaining() / 4 < count) {
    fail(ErrorCode::kTruncated, "feature grid payload shorter than header promises");
  }
  grid.data.resize(count);
  for (auto& v : grid.data) v = r.f32();
  grid.validate();
  return grid;
}

FeatureGrid read_feature_grid(const fs::path& path) {
  try {
    return decode_feature_grid(read_file(path));
  } catch (const Error& e) {
    if (is_io_error(e.code())) throw;
    fail(e.code(), describe(path) + ": " + e.what());
  }
}

void write_feature_grid(const FeatureGrid& grid, const fs::path& path) {
  write_file_atomic(path, encode_feature_grid(grid));
}

GridHeader read_feature_grid_header(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!fs::exists(path)) fail(ErrorCode::kMissingFile, "no such file " + describe(path));
    fail(ErrorCode::kIo, "cannot open " + describe(path));
  }
  std::uint8_t buf[kGridHeaderBytes];
  in.read(reinterpret_cast<char*>(buf), kGridHeaderBytes);
  const auto got = static_cast<std::size_t>(in.gcount());
  detail::ByteReader r({buf, got}, ErrorCode::kTruncated);
  try {
    return decode_grid_header(r);
  } catch (const Error& e) {
    fail(e.code(), describe(path) + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// PGM rasters

void validate_tri_class(const LabelRaster& raster) {
  for (std::size_t i = 0; i < raster.values.size(); ++i) {
    if (raster.values[i] > kAnomaly) {
      fail(ErrorCode::kValueOutOfRange,
           "tri-class raster holds value " + std::to_string(raster.values[i]) +
               " at pixel " + std::to_string(i));
    }
  }
}

std::vector<std::uint8_t> encode_pgm(const LabelRaster& raster) {
  if (raster.height == 0 || raster.width == 0 ||
      raster.values.size() != static_cast<std::size_t>(raster.height) * raster.width) {
    fail(ErrorCode::kBadDims, "raster dimensions do not match its payload");
  }
  const std::uint16_t top =
      *std::max_element(raster.values.begin(), raster.values.end());
  const bool wide = top > 255;
  std::string header = "P5\n" + std::to_string(raster.width) + " " +
                       std::to_string(raster.height) + "\n" +
                       (wide ? "65535" : "255") + "\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + raster.values.size() * (wide ? 2 : 1));
  for (std::uint16_t v : raster.values) {
    if (wide) out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
  }
  return out;
}

namespace {

struct PgmCursor {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;

  static bool is_space(std::uint8_t c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
  }

  void skip_space_and_comments() {
    while (pos < bytes.size()) {
      if (is_space(bytes[pos])) {
        ++pos;
      } else if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else {
        return;
      }
    }
  }

  std::uint32_t number() {
    skip_space_and_comments();
    std::uint64_t v = 0;
    std::size_t digits = 0;
    while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
      v = v * 10 + (bytes[pos] - '0');
      if (v > UINT32_MAX) fail(ErrorCode::kUnsupportedFormat, "PGM header value too large");
      ++pos;
      ++digits;
    }
    if (digits == 0) fail(ErrorCode::kUnsupportedFormat, "malformed PGM header");
    return static_cast<std::uint32_t>(v);
  }
};

RasterHeader parse_pgm_header(PgmCursor& c) {
  if (c.bytes.size() < 2 || c.bytes[0] != 'P' || c.bytes[1] != '5') {
    fail(ErrorCode::kUnsupportedFormat, "only binary PGM (P5) rasters are supported");
  }
  c.pos = 2;
  RasterHeader h;
  h.width = c.number();
  h.height = c.number();
  h.maxval = c.number();
  if (h.width == 0 || h.height == 0) {
    fail(ErrorCode::kUnsupportedFormat, "PGM raster has a zero dimension");
  }
  if (h.maxval == 0 || h.maxval > 65535) {
    fail(ErrorCode::kUnsupportedFormat, "PGM maxval must be in [1, 65535]");
  }
  if (c.pos >= c.bytes.size() || !PgmCursor::is_space(c.bytes[c.pos])) {
    fail(ErrorCode::kUnsupportedFormat, "PGM header not terminated by whitespace");
  }
  ++c.pos;
  return h;
}

}  // namespace

LabelRaster decode_pgm(std::span<const std::uint8_t> bytes, RasterKind kind) {
  PgmCursor c{bytes};
  const RasterHeader h = parse_pgm_header(c);
  const std::size_t n = static_cast<std::size_t>(h.width) * h.height;
  const std::size_t width_bytes = h.maxval > 255 ? 2 : 1;
  if (bytes.size() - c.pos < n * width_bytes) {
    fail(ErrorCode::kTruncated, "PGM pixel data shorter than header promises");
  }
  LabelRaster raster(h.height, h.width, kind);
  const std::uint8_t* p = bytes.data() + c.pos;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint16_t v = width_bytes == 2
                          ? static_cast<std::uint16_t>((p[2 * i] << 8) | p[2 * i + 1])
                          : p[i];
    if (v > h.maxval) {
      fail(ErrorCode::kValueOutOfRange, "PGM sample exceeds maxval");
    }
    raster.values[i] = v;
  }
  if (kind == RasterKind::kTriClass) validate_tri_class(raster);
  return raster;
}

LabelRaster read_label_raster(const fs::path& path, RasterKind kind) {
  try {
    return decode_pgm(read_file(path), kind);
  } catch (const Error& e) {
    if (is_io_error(e.code())) throw;
    fail(e.code(), describe(path) + ": " + e.what());
  }
}

void write_label_raster(const LabelRaster& raster, const fs::path& path) {
  if (raster.kind == RasterKind::kTriClass) validate_tri_class(raster);
  write_file_atomic(path, encode_pgm(raster));
}

RasterHeader read_pgm_header(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!fs::exists(path)) fail(ErrorCode::kMissingFile, "no such file " + describe(path));
    fail(ErrorCode::kIo, "cannot open " + describe(path));
  }
  // A P5 header with comments fits comfortably in 4 KiB.
  std::vector<std::uint8_t> buf(4096);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  buf.resize(static_cast<std::size_t>(in.gcount()));
  PgmCursor c{buf};
  try {
    return parse_pgm_header(c);
  } catch (const Error& e) {
    fail(e.code(), describe(path) + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Manifests

std::string_view role_name(CorpusRole role) {
  switch (role) {
    case CorpusRole::kMixed: return "mixed";
    case CorpusRole::kReference: return "reference";
    case CorpusRole::kTest: return "test";
  }
  return "mixed";
}

CorpusRole parse_role(std::string_view name) {
  if (name == "mixed") return CorpusRole::kMixed;
  if (name == "reference") return CorpusRole::kReference;
  if (name == "test") return CorpusRole::kTest;
  fail(ErrorCode::kUnsupportedFormat, "unknown corpus role '" + std::string(name) + "'");
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

std::uint32_t parse_dim(std::string_view s, std::size_t line_no) {
  std::uint32_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v == 0) {
    fail(ErrorCode::kUnsupportedFormat,
         "manifest line " + std::to_string(line_no) + ": bad image dimension '" +
             std::string(s) + "'");
  }
  return v;
}

std::optional<fs::path> optional_path(std::string_view s, const fs::path& base) {
  if (s == "-") return std::nullopt;
  fs::path p(s);
  return p.is_absolute() ? p : base / p;
}

}  // namespace

DatasetManifest read_manifest(const fs::path& path) {
  const auto bytes = read_file(path);
  std::string text(bytes.begin(), bytes.end());
  const fs::path base = path.parent_path();

  DatasetManifest manifest;
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  bool have_role = false;
  while (std::getline(lines, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_role) {
      constexpr std::string_view kPrefix = "role=";
      if (line.rfind(kPrefix, 0) != 0) {
        fail(ErrorCode::kUnsupportedFormat,
             describe(path) + ": first line must be role=<mixed|reference|test>");
      }
      manifest.role = parse_role(std::string_view(line).substr(kPrefix.size()));
      have_role = true;
      continue;
    }
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 5) {
      fail(ErrorCode::kUnsupportedFormat,
           describe(path) + ": line " + std::to_string(line_no) +
               " must have 5 tab-separated fields");
    }
    ImageRecord rec;
    rec.features = *optional_path(fields[0], base);
    rec.image_height = parse_dim(fields[1], line_no);
    rec.image_width = parse_dim(fields[2], line_no);
    rec.instances = optional_path(fields[3], base);
    rec.ground_truth = optional_path(fields[4], base);
    manifest.records.push_back(std::move(rec));
  }
  if (!have_role) {
    fail(ErrorCode::kUnsupportedFormat, describe(path) + ": missing role line");
  }
  if (manifest.records.empty()) {
    fail(ErrorCode::kEmptyManifest, describe(path) + " lists no images");
  }

  for (auto& rec : manifest.records) {
    const GridHeader gh = read_feature_grid_header(rec.features);
    rec.grid_rows = gh.rows;
    rec.grid_cols = gh.cols;
    if (manifest.dim == 0) manifest.dim = gh.dim;
    if (gh.dim != manifest.dim) {
      fail(ErrorCode::kDimMismatch, describe(rec.features) + " has embedding dim " +
                                        std::to_string(gh.dim) + ", expected " +
                                        std::to_string(manifest.dim));
    }
    if (rec.image_height < gh.rows || rec.image_width < gh.cols) {
      fail(ErrorCode::kDimMismatch,
           describe(rec.features) + ": image smaller than its patch grid");
    }
    for (const auto& raster : {rec.instances, rec.ground_truth}) {
      if (!raster) continue;
      const RasterHeader rh = read_pgm_header(*raster);
      if (rh.height != rec.image_height || rh.width != rec.image_width) {
        fail(ErrorCode::kDimMismatch,
             describe(*raster) + " is " + std::to_string(rh.height) + "x" +
                 std::to_string(rh.width) + ", manifest says " +
                 std::to_string(rec.image_height) + "x" +
                 std::to_string(rec.image_width));
      }
    }
  }
  return manifest;
}

void write_manifest(const DatasetManifest& manifest, const fs::path& path,
                    const fs::path& base) {
  auto rel = [&](const fs::path& p) {
    const fs::path r = p.lexically_relative(base);
    if (r.empty() || *r.begin() == "..") return p.generic_string();
    return r.generic_string();
  };
  std::string out = "role=" + std::string(role_name(manifest.role)) + "\n";
  for (const auto& rec : manifest.records) {
    out += rel(rec.features);
    out += '\t' + std::to_string(rec.image_height);
    out += '\t' + std::to_string(rec.image_width);
    out += '\t' + (rec.instances ? rel(*rec.instances) : std::string("-"));
    out += '\t' + (rec.ground_truth ? rel(*rec.ground_truth) : std::string("-"));
    out += '\n';
  }
  write_text_atomic(path, out);
}

}  // namespace pasta
