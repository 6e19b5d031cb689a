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

// Persisted artifacts. Each file is an 8-byte magic, a u32 format version,
// a little-endian payload and a u64 FNV-1a checksum of everything before it.
//
//   codebook  "PASTACBK": k u32, dim u32, seed u64, centroids f64[k*dim],
//                         counts u64[k], epochs u32, inertia f64[epochs]
//   model     "PASTAMDL": codebook payload, gamma f64, threshold f64,
//                         mixed counts u64[k], reference counts u64[k],
//                         ratios (defined u8, value f64)[k],
//                         anomaly count u32, anomaly ids u32[]
//   bag       "PASTABAG": dim u32, kSphere u32, n u64, embeddings f64[n*dim],
//                         radii f64[n], source index u64[n]

#ifndef PASTA_MODEL_IO_HPP
#define PASTA_MODEL_IO_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pasta/baseline.hpp"
#include "pasta/clustering.hpp"
#include "pasta/distribution.hpp"

namespace pasta {

inline constexpr std::uint32_t kModelFormatVersion = 1;

std::vector<std::uint8_t> encode_codebook(const ClusterCodebook& codebook);
ClusterCodebook decode_codebook(std::span<const std::uint8_t> bytes);
void save_codebook(const ClusterCodebook& codebook, const std::filesystem::path& path);
ClusterCodebook load_codebook(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_model(const PastaModel& model);
PastaModel decode_model(std::span<const std::uint8_t> bytes);
void save_model(const PastaModel& model, const std::filesystem::path& path);
PastaModel load_model(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_bag(const FeatureBag& bag);
FeatureBag decode_bag(std::span<const std::uint8_t> bytes);
void save_bag(const FeatureBag& bag, const std::filesystem::path& path);
FeatureBag load_bag(const std::filesystem::path& path);

}  // namespace pasta

#endif  // PASTA_MODEL_IO_HPP
