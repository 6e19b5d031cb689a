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

#ifndef PASTA_EVALUATION_HPP
#define PASTA_EVALUATION_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pasta/tensor_io.hpp"

namespace pasta {

inline constexpr std::size_t kNumClasses = 3;

// Dataset-wide pixel counts per class (background, target, anomaly).
struct ConfusionCounts {
  std::array<std::uint64_t, kNumClasses> tp{};
  std::array<std::uint64_t, kNumClasses> fp{};
  std::array<std::uint64_t, kNumClasses> fn{};

  ConfusionCounts& operator+=(const ConfusionCounts& other);
  bool operator==(const ConfusionCounts&) const = default;
};

struct IoUReport {
  // Percent; nullopt when the class never occurs in prediction or truth.
  std::array<std::optional<double>, kNumClasses> iou;
  double miou = 0.0;
};

enum class EvalMode : std::uint8_t {
  kPatch,  // anomaly vs. nominal, anomaly IoU only
  kFused,  // full tri-class
};

void accumulate_confusion(const TriClassMask& pred, const TriClassMask& gt,
                          ConfusionCounts& counts);

// Maps classes {0,1} to 0 and keeps 2.
TriClassMask merge_nominal(const TriClassMask& mask);

// Patch mode merges nominal classes in both inputs before counting.
void accumulate_confusion(const TriClassMask& pred, const TriClassMask& gt, EvalMode mode,
                          ConfusionCounts& counts);

IoUReport iou_report(const ConfusionCounts& counts);
// Only the anomaly class is reported; miou equals the anomaly IoU.
IoUReport anomaly_iou_report(const ConfusionCounts& counts);
IoUReport iou_report(const ConfusionCounts& counts, EvalMode mode);

struct SeedAggregate {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation
  std::size_t n = 0;
  std::vector<double> values;
};

SeedAggregate aggregate_seeds(std::span<const double> values);

}  // namespace pasta

#endif  // PASTA_EVALUATION_HPP
