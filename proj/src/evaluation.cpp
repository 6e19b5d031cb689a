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

#include "pasta/evaluation.hpp"

#include <cmath>

#include "pasta/error.hpp"

namespace pasta {

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& other) {
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    tp[c] += other.tp[c];
    fp[c] += other.fp[c];
    fn[c] += other.fn[c];
  }
  return *this;
}

void accumulate_confusion(const TriClassMask& pred, const TriClassMask& gt,
                          ConfusionCounts& counts) {
  if (pred.height != gt.height || pred.width != gt.width ||
      pred.values.size() != gt.values.size()) {
    fail(ErrorCode::kDimMismatch, "prediction and ground truth dimensions differ");
  }
  validate_tri_class(pred);
  validate_tri_class(gt);
  for (std::size_t i = 0; i < pred.values.size(); ++i) {
    const auto p = pred.values[i];
    const auto g = gt.values[i];
    if (p == g) {
      ++counts.tp[g];
    } else {
      ++counts.fp[p];
      ++counts.fn[g];
    }
  }
}

TriClassMask merge_nominal(const TriClassMask& mask) {
  TriClassMask out = mask;
  for (auto& v : out.values) {
    if (v != kAnomaly) v = kBackground;
  }
  return out;
}

void accumulate_confusion(const TriClassMask& pred, const TriClassMask& gt, EvalMode mode,
                          ConfusionCounts& counts) {
  if (mode == EvalMode::kFused) {
    accumulate_confusion(pred, gt, counts);
  } else {
    accumulate_confusion(merge_nominal(pred), merge_nominal(gt), counts);
  }
}

namespace {

std::optional<double> class_iou(const ConfusionCounts& counts, std::size_t c) {
  const std::uint64_t denom = counts.tp[c] + counts.fp[c] + counts.fn[c];
  if (denom == 0) return std::nullopt;
  return 100.0 * static_cast<double>(counts.tp[c]) / static_cast<double>(denom);
}

}  // namespace

IoUReport iou_report(const ConfusionCounts& counts) {
  IoUReport report;
  double sum = 0.0;
  std::size_t defined = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    report.iou[c] = class_iou(counts, c);
    if (report.iou[c]) {
      sum += *report.iou[c];
      ++defined;
    }
  }
  if (defined == 0) fail(ErrorCode::kAllClassesUndefined, "no class has a non-zero union");
  report.miou = sum / static_cast<double>(defined);
  return report;
}

IoUReport anomaly_iou_report(const ConfusionCounts& counts) {
  IoUReport report;
  report.iou[kAnomaly] = class_iou(counts, kAnomaly);
  if (!report.iou[kAnomaly]) {
    fail(ErrorCode::kAllClassesUndefined, "anomaly class has a zero union");
  }
  report.miou = *report.iou[kAnomaly];
  return report;
}

IoUReport iou_report(const ConfusionCounts& counts, EvalMode mode) {
  return mode == EvalMode::kFused ? iou_report(counts) : anomaly_iou_report(counts);
}

SeedAggregate aggregate_seeds(std::span<const double> values) {
  if (values.empty()) fail(ErrorCode::kEmptyInput, "no values to aggregate");
  SeedAggregate agg;
  agg.n = values.size();
  agg.values.assign(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  agg.mean = sum / static_cast<double>(agg.n);
  if (agg.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - agg.mean) * (v - agg.mean);
    agg.std = std::sqrt(ss / static_cast<double>(agg.n - 1));
  }
  return agg;
}

}  // namespace pasta
