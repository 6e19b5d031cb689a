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

#include "pasta/model_io.hpp"

#include <cmath>
#include <string>
#include <string_view>

#include "byte_io.hpp"
#include "pasta/error.hpp"

namespace fs = std::filesystem;

namespace pasta {
namespace {

constexpr std::string_view kCodebookMagic = "PASTACBK";
constexpr std::string_view kModelMagic = "PASTAMDL";
constexpr std::string_view kBagMagic = "PASTABAG";

// Guards against absurd allocations when a corrupt header is read.
constexpr std::uint64_t kMaxElements = 1ULL << 32;

void begin(detail::ByteWriter& w, std::string_view magic) {
  w.put_bytes(magic);
  w.put_u32(kModelFormatVersion);
}

std::vector<std::uint8_t> finish(detail::ByteWriter& w) {
  const std::uint64_t sum = detail::fnv1a(w.bytes());
  w.put_u64(sum);
  return w.take();
}

// Checks magic, version and checksum; returns a reader over the payload.
detail::ByteReader open_payload(std::span<const std::uint8_t> bytes, std::string_view magic,
                                std::string_view what) {
  if (bytes.size() < magic.size() + 4 + 8 ||
      std::string_view(reinterpret_cast<const char*>(bytes.data()), magic.size()) != magic) {
    fail(ErrorCode::kCorrupt, std::string(what) + " file has wrong magic");
  }
  detail::ByteReader header(bytes.subspan(magic.size(), 4), ErrorCode::kCorrupt);
  const std::uint32_t version = header.u32();
  if (version != kModelFormatVersion) {
    fail(ErrorCode::kVersionMismatch, std::string(what) + " format version " +
                                          std::to_string(version) + ", expected " +
                                          std::to_string(kModelFormatVersion));
  }
  const auto body = bytes.first(bytes.size() - 8);
  detail::ByteReader trailer(bytes.subspan(bytes.size() - 8), ErrorCode::kCorrupt);
  if (trailer.u64() != detail::fnv1a(body)) {
    fail(ErrorCode::kCorrupt, std::string(what) + " file fails its checksum");
  }
  detail::ByteReader r(body, ErrorCode::kCorrupt);
  r.take_bytes(magic.size() + 4);
  return r;
}

std::uint64_t checked_count(std::uint64_t n, std::uint64_t per_element, const detail::ByteReader& r) {
  if (n > kMaxElements || n * per_element > r.remaining()) {
    fail(ErrorCode::kCorrupt, "element count exceeds payload");
  }
  return n;
}

void put_codebook(detail::ByteWriter& w, const ClusterCodebook& cb) {
  w.put_u32(cb.k);
  w.put_u32(cb.dim);
  w.put_u64(cb.seed);
  for (double v : cb.centroids) w.put_f64(v);
  for (auto c : cb.counts) w.put_u64(c);
  w.put_u32(static_cast<std::uint32_t>(cb.inertia_history.size()));
  for (double v : cb.inertia_history) w.put_f64(v);
}

ClusterCodebook get_codebook(detail::ByteReader& r) {
  ClusterCodebook cb;
  cb.k = r.u32();
  cb.dim = r.u32();
  cb.seed = r.u64();
  if (cb.k < 2 || cb.dim == 0) fail(ErrorCode::kCorrupt, "codebook has invalid k or dim");
  const std::uint64_t n = checked_count(static_cast<std::uint64_t>(cb.k) * cb.dim, 8, r);
  cb.centroids.resize(n);
  for (auto& v : cb.centroids) {
    v = r.f64();
    if (!std::isfinite(v)) fail(ErrorCode::kCorrupt, "codebook holds a non-finite centroid");
  }
  cb.counts.resize(checked_count(cb.k, 8, r));
  for (auto& c : cb.counts) c = r.u64();
  cb.inertia_history.resize(checked_count(r.u32(), 8, r));
  for (auto& v : cb.inertia_history) v = r.f64();
  return cb;
}

void expect_end(const detail::ByteReader& r, std::string_view what) {
  if (r.remaining() != 0) fail(ErrorCode::kCorrupt, std::string(what) + " file has trailing bytes");
}

std::vector<std::uint8_t> read_artifact(const fs::path& path) { return read_file(path); }

template <typename T, typename Decode>
T load_with_context(const fs::path& path, Decode decode) {
  const auto bytes = read_artifact(path);
  try {
    return decode(bytes);
  } catch (const Error& e) {
    fail(e.code(), "'" + path.string() + "': " + e.what());
  }
}

}  // namespace

std::vector<std::uint8_t> encode_codebook(const ClusterCodebook& codebook) {
  detail::ByteWriter w;
  begin(w, kCodebookMagic);
  put_codebook(w, codebook);
  return finish(w);
}

ClusterCodebook decode_codebook(std::span<const std::uint8_t> bytes) {
  auto r = open_payload(bytes, kCodebookMagic, "codebook");
  ClusterCodebook cb = get_codebook(r);
  expect_end(r, "codebook");
  return cb;
}

void save_codebook(const ClusterCodebook& codebook, const fs::path& path) {
  write_file_atomic(path, encode_codebook(codebook));
}

ClusterCodebook load_codebook(const fs::path& path) {
  return load_with_context<ClusterCodebook>(path, decode_codebook);
}

std::vector<std::uint8_t> encode_model(const PastaModel& model) {
  model.validate();
  detail::ByteWriter w;
  begin(w, kModelMagic);
  put_codebook(w, model.codebook);
  w.put_f64(model.gamma);
  w.put_f64(model.anomalies.threshold);
  for (auto c : model.mixed.counts) w.put_u64(c);
  for (auto c : model.reference.counts) w.put_u64(c);
  for (const auto& ratio : model.anomalies.ratios) {
    w.put_u8(ratio ? 1 : 0);
    w.put_f64(ratio.value_or(0.0));
  }
  w.put_u32(static_cast<std::uint32_t>(model.anomalies.ids.size()));
  for (auto id : model.anomalies.ids) w.put_u32(id);
  return finish(w);
}

PastaModel decode_model(std::span<const std::uint8_t> bytes) {
  auto r = open_payload(bytes, kModelMagic, "model");
  PastaModel model;
  model.codebook = get_codebook(r);
  const std::uint32_t k = model.codebook.k;
  model.gamma = r.f64();
  model.anomalies.threshold = r.f64();
  std::vector<std::uint64_t> mixed(checked_count(k, 8, r));
  for (auto& c : mixed) c = r.u64();
  std::vector<std::uint64_t> reference(checked_count(k, 8, r));
  for (auto& c : reference) c = r.u64();
  model.mixed = ClusterDistribution::from_counts(std::move(mixed));
  model.reference = ClusterDistribution::from_counts(std::move(reference));
  model.anomalies.ratios.resize(k);
  for (auto& ratio : model.anomalies.ratios) {
    const std::uint8_t defined = r.u8();
    const double value = r.f64();
    if (defined > 1) fail(ErrorCode::kCorrupt, "bad ratio flag");
    if (defined) ratio = value;
  }
  model.anomalies.ids.resize(checked_count(r.u32(), 4, r));
  for (auto& id : model.anomalies.ids) id = r.u32();
  expect_end(r, "model");

  try {
    model.validate();
  } catch (const Error& e) {
    fail(ErrorCode::kCorrupt, e.what());
  }
  // The stored anomaly set must be exactly what the stored ratios imply.
  if (!(model.anomalies.threshold >= 0.0 && model.anomalies.threshold <= 1.0) ||
      define_anomaly_set(model.anomalies.ratios, model.anomalies.threshold) != model.anomalies) {
    fail(ErrorCode::kCorrupt, "anomaly set is inconsistent with the stored ratios");
  }
  return model;
}

void save_model(const PastaModel& model, const fs::path& path) {
  write_file_atomic(path, encode_model(model));
}

PastaModel load_model(const fs::path& path) {
  return load_with_context<PastaModel>(path, decode_model);
}

std::vector<std::uint8_t> encode_bag(const FeatureBag& bag) {
  detail::ByteWriter w;
  begin(w, kBagMagic);
  w.put_u32(bag.dim);
  w.put_u32(bag.k_sphere);
  w.put_u64(bag.size());
  for (double v : bag.embeddings.data) w.put_f64(v);
  for (double v : bag.radii) w.put_f64(v);
  for (auto i : bag.source_index) w.put_u64(i);
  return finish(w);
}

FeatureBag decode_bag(std::span<const std::uint8_t> bytes) {
  auto r = open_payload(bytes, kBagMagic, "bag");
  FeatureBag bag;
  bag.dim = r.u32();
  bag.k_sphere = r.u32();
  if (bag.dim == 0) fail(ErrorCode::kCorrupt, "bag has zero dim");
  const std::uint64_t n = checked_count(r.u64(), 8ULL * (bag.dim + 2), r);
  bag.embeddings.dim = bag.dim;
  bag.embeddings.data.resize(n * bag.dim);
  for (auto& v : bag.embeddings.data) v = r.f64();
  bag.radii.resize(n);
  for (auto& v : bag.radii) {
    v = r.f64();
    if (!(v >= 0.0)) fail(ErrorCode::kCorrupt, "bag holds a negative radius");
  }
  bag.source_index.resize(n);
  for (auto& i : bag.source_index) i = r.u64();
  expect_end(r, "bag");
  return bag;
}

void save_bag(const FeatureBag& bag, const fs::path& path) {
  write_file_atomic(path, encode_bag(bag));
}

FeatureBag load_bag(const fs::path& path) {
  return load_with_context<FeatureBag>(path, decode_bag);
}

}  // namespace pasta
