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

// On-disk formats.
//
//   Feature grid (.pfv):  "PASTAFV1" | rows u32 | cols u32 | dim u32 |
//                         rows*cols*dim f32, row-major (row, col, channel).
//                         All little-endian.
//   Label raster (.pgm):  binary PGM "P5". maxval <= 255 stores one byte per
//                         pixel, larger maxval two big-endian bytes.
//   Manifest (.tsv):      "role=<mixed|reference|test>" then one record per
//                         line: features, imageH, imageW, instances|-, gt|-
//                         separated by tabs. Relative paths resolve against
//                         the manifest's directory.

#ifndef PASTA_TENSOR_IO_HPP
#define PASTA_TENSOR_IO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pasta {

// Patch embeddings of one image.
struct FeatureGrid {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::uint32_t dim = 0;
  std::vector<float> data;

  std::size_t patch_count() const {
    return static_cast<std::size_t>(rows) * cols;
  }
  std::span<const float> patch(std::size_t index) const {
    return {data.data() + index * dim, dim};
  }
  std::span<const float> patch(std::size_t row, std::size_t col) const {
    return patch(row * cols + col);
  }

  // Throws kBadDims or kNonFinite.
  void validate() const;

  bool operator==(const FeatureGrid&) const = default;
};

enum class RasterKind : std::uint8_t { kTriClass, kInstance };

inline constexpr std::uint16_t kBackground = 0;
inline constexpr std::uint16_t kTarget = 1;
inline constexpr std::uint16_t kAnomaly = 2;

// Per-pixel labels, either tri-class {0,1,2} or instance ids (0 background).
struct LabelRaster {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  RasterKind kind = RasterKind::kTriClass;
  std::vector<std::uint16_t> values;

  LabelRaster() = default;
  LabelRaster(std::uint32_t h, std::uint32_t w, RasterKind k,
              std::uint16_t fill = 0)
      : height(h), width(w), kind(k),
        values(static_cast<std::size_t>(h) * w, fill) {}

  std::size_t size() const { return values.size(); }
  std::uint16_t at(std::size_t y, std::size_t x) const {
    return values[y * width + x];
  }
  std::uint16_t& at(std::size_t y, std::size_t x) {
    return values[y * width + x];
  }

  bool operator==(const LabelRaster&) const = default;
};

using TriClassMask = LabelRaster;

// Throws kValueOutOfRange if any value is outside {0,1,2}.
void validate_tri_class(const LabelRaster& raster);

FeatureGrid read_feature_grid(const std::filesystem::path& path);
void write_feature_grid(const FeatureGrid& grid,
                        const std::filesystem::path& path);

std::vector<std::uint8_t> encode_feature_grid(const FeatureGrid& grid);
FeatureGrid decode_feature_grid(std::span<const std::uint8_t> bytes);

struct GridHeader {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::uint32_t dim = 0;
};
GridHeader read_feature_grid_header(const std::filesystem::path& path);

// Tri-class rasters are validated on read.
LabelRaster read_label_raster(const std::filesystem::path& path,
                              RasterKind kind);
void write_label_raster(const LabelRaster& raster,
                        const std::filesystem::path& path);

std::vector<std::uint8_t> encode_pgm(const LabelRaster& raster);
LabelRaster decode_pgm(std::span<const std::uint8_t> bytes, RasterKind kind);

struct RasterHeader {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::uint32_t maxval = 0;
};
RasterHeader read_pgm_header(const std::filesystem::path& path);

enum class CorpusRole : std::uint8_t { kMixed, kReference, kTest };

std::string_view role_name(CorpusRole role);
CorpusRole parse_role(std::string_view name);

struct ImageRecord {
  std::filesystem::path features;
  std::uint32_t image_height = 0;
  std::uint32_t image_width = 0;
  std::optional<std::filesystem::path> instances;
  std::optional<std::filesystem::path> ground_truth;
  // Filled by read_manifest from the feature file header.
  std::uint32_t grid_rows = 0;
  std::uint32_t grid_cols = 0;
};

struct DatasetManifest {
  CorpusRole role = CorpusRole::kMixed;
  std::vector<ImageRecord> records;
  std::uint32_t dim = 0;

  std::size_t size() const { return records.size(); }
};

// Validates existence and dimensions of every referenced file.
DatasetManifest read_manifest(const std::filesystem::path& path);

// Paths are written relative to `base` when they live below it.
void write_manifest(const DatasetManifest& manifest,
                    const std::filesystem::path& path,
                    const std::filesystem::path& base);

// Writes through a sibling temp file and renames over the target.
void write_file_atomic(const std::filesystem::path& path,
                       std::span<const std::uint8_t> bytes);
void write_text_atomic(const std::filesystem::path& path,
                       std::string_view text);
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

}  // namespace pasta

#endif  // PASTA_TENSOR_IO_HPP
