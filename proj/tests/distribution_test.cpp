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

#include "pasta/distribution.hpp"

#include <random>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace {

using pasta::ClusterDistribution;
using pasta::ErrorCode;

pasta::ClusterCodebook line_codebook(std::uint32_t k) {
  // Centroids at 0, 10, 20, ... on a 1-D line.
  pasta::ClusterCodebook cb;
  cb.k = k;
  cb.dim = 1;
  for (std::uint32_t i = 0; i < k; ++i) cb.centroids.push_back(10.0 * i);
  cb.counts.assign(k, 0);
  return cb;
}

pasta::FeatureGrid line_grid(std::vector<float> values) {
  pasta::FeatureGrid g;
  g.rows = 1;
  g.cols = static_cast<std::uint32_t>(values.size());
  g.dim = 1;
  g.data = std::move(values);
  return g;
}

TEST(EstimateDistribution, CountsPatches) {
  const auto cb = line_codebook(4);
  const std::vector<pasta::FeatureGrid> grids = {line_grid({30.5f, 29.0f})};
  const auto d = pasta::estimate_distribution(cb, grids);
  EXPECT_EQ(d.counts, (std::vector<std::uint64_t>{0, 0, 0, 2}));
  EXPECT_EQ(d.probs, (std::vector<double>{0, 0, 0, 1}));
  EXPECT_EQ(d.total, 2u);
}

TEST(EstimateDistribution, AdditiveAndMatchesTally) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<float> u(-5, 45);
  const auto cb = line_codebook(5);
  std::vector<pasta::FeatureGrid> grids;
  for (int i = 0; i < 10; ++i) {
    std::vector<float> v(7);
    for (auto& x : v) x = u(gen);
    grids.push_back(line_grid(v));
  }
  std::vector<std::uint64_t> tally(5, 0);
  for (const auto& g : grids) {
    for (std::size_t p = 0; p < g.patch_count(); ++p) ++tally[pasta::assign(cb, g.patch(p))];
  }
  const auto all = pasta::estimate_distribution(cb, grids);
  EXPECT_EQ(all.counts, tally);

  const std::span<const pasta::FeatureGrid> span(grids);
  const auto a = pasta::estimate_distribution(cb, span.first(4));
  const auto b = pasta::estimate_distribution(cb, span.subspan(4));
  for (std::size_t c = 0; c < 5; ++c) EXPECT_EQ(all.counts[c], a.counts[c] + b.counts[c]);

  double sum = 0;
  for (double p : all.probs) sum += p;
  EXPECT_NEAR(sum, 1.0, 1e-9);
}

TEST(EstimateDistribution, DuplicationLeavesProbabilitiesUnchanged) {
  const auto cb = line_codebook(3);
  std::vector<pasta::FeatureGrid> grids = {line_grid({0, 9, 21}), line_grid({1, 2, 19})};
  const auto once = pasta::estimate_distribution(cb, grids);
  const auto copy = grids;
  grids.insert(grids.end(), copy.begin(), copy.end());
  const auto twice = pasta::estimate_distribution(cb, grids);
  EXPECT_EQ(once.probs, twice.probs);
}

TEST(EstimateDistribution, Errors) {
  const auto cb = line_codebook(3);
  EXPECT_PASTA_ERROR(pasta::estimate_distribution(cb, std::span<const pasta::FeatureGrid>{}),
                     ErrorCode::kEmptyManifest);
  pasta::FeatureGrid wide;
  wide.rows = wide.cols = 1;
  wide.dim = 2;
  wide.data = {0, 0};
  const std::vector<pasta::FeatureGrid> grids = {wide};
  EXPECT_PASTA_ERROR(pasta::estimate_distribution(cb, grids), ErrorCode::kDimMismatch);
}

TEST(ComputeRatios, HandDerivedExample) {
  const auto mixed = ClusterDistribution::from_counts({50, 30, 20});
  const auto ref = ClusterDistribution::from_counts({55, 45, 0});
  const auto r = pasta::compute_ratios(ref, mixed);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_NEAR(*r[0], 1.1, 1e-12);
  EXPECT_NEAR(*r[1], 1.5, 1e-12);
  EXPECT_EQ(*r[2], 0.0);
  const auto set = pasta::define_anomaly_set(r, 0.05);
  EXPECT_EQ(set.ids, (std::vector<std::uint32_t>{2}));
}

TEST(ComputeRatios, EqualDistributionsGiveOne) {
  const auto d = ClusterDistribution::from_counts({3, 9, 27, 1});
  for (const auto& r : pasta::compute_ratios(d, d)) EXPECT_DOUBLE_EQ(*r, 1.0);
  EXPECT_TRUE(pasta::define_anomaly_set(pasta::compute_ratios(d, d), 0.05).ids.empty());
}

TEST(ComputeRatios, ZeroMixedMassIsUndefinedAndNominal) {
  const auto mixed = ClusterDistribution::from_counts({10, 0});
  const auto ref = ClusterDistribution::from_counts({5, 5});
  const auto r = pasta::compute_ratios(ref, mixed);
  EXPECT_TRUE(r[0].has_value());
  EXPECT_FALSE(r[1].has_value());
  EXPECT_FALSE(pasta::define_anomaly_set(r, 1.0).contains(1));
}

TEST(ComputeRatios, KMismatch) {
  EXPECT_PASTA_ERROR(pasta::compute_ratios(ClusterDistribution::from_counts({1, 2}),
                                           ClusterDistribution::from_counts({1, 2, 3})),
                     ErrorCode::kKMismatch);
}

TEST(DefineAnomalySet, StrictThreshold) {
  const pasta::ClusterRatios r = {0.0, 0.05, 0.049, std::nullopt, 1.0};
  EXPECT_TRUE(pasta::define_anomaly_set(r, 0.0).ids.empty());
  EXPECT_EQ(pasta::define_anomaly_set(r, 0.05).ids, (std::vector<std::uint32_t>{0, 2}));
  EXPECT_EQ(pasta::define_anomaly_set(r, 1.0).ids, (std::vector<std::uint32_t>{0, 1, 2}));
  EXPECT_PASTA_ERROR(pasta::define_anomaly_set(r, 1.5), ErrorCode::kInvalidArgument);
  EXPECT_PASTA_ERROR(pasta::define_anomaly_set(r, -0.1), ErrorCode::kInvalidArgument);
}

TEST(DefineAnomalySet, MembershipIffDefinedAndBelow) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0, 2);
  for (int trial = 0; trial < 50; ++trial) {
    pasta::ClusterRatios r(12);
    for (auto& x : r) {
      if (u(gen) < 0.3) x = std::nullopt; else if (u(gen) < 0.3) x = 0.0; else x = u(gen) / 10;
    }
    const double t = u(gen) / 2;
    const auto set = pasta::define_anomaly_set(r, t);
    const auto member = set.membership();
    for (std::uint32_t i = 0; i < r.size(); ++i) {
      const bool expected = r[i].has_value() && *r[i] < t;
      EXPECT_EQ(set.contains(i), expected);
      EXPECT_EQ(member[i] != 0, expected);
    }
    EXPECT_TRUE(std::is_sorted(set.ids.begin(), set.ids.end()));
  }
}

TEST(DefineAnomalySet, MonotoneInThreshold) {
  const pasta::ClusterRatios r = {0.0, 0.3, 0.01, 0.7, std::nullopt, 0.99, 0.5, 0.05};
  std::vector<std::uint32_t> previous;
  for (int i = 0; i <= 20; ++i) {
    const auto ids = pasta::define_anomaly_set(r, i / 20.0).ids;
    EXPECT_TRUE(std::includes(ids.begin(), ids.end(), previous.begin(), previous.end()));
    previous = ids;
  }
}

TEST(BuildModel, ComposesAndValidates) {
  auto cb = line_codebook(3);
  const std::vector<pasta::FeatureGrid> mixed = {line_grid({0, 10, 20, 20})};
  const std::vector<pasta::FeatureGrid> ref = {line_grid({0, 10, 10, 0})};
  const auto model = pasta::build_model(cb, pasta::estimate_distribution(cb, mixed),
                                        pasta::estimate_distribution(cb, ref), 0.05, 0.1);
  EXPECT_EQ(model.anomalies.ids, (std::vector<std::uint32_t>{2}));
  EXPECT_EQ(model.gamma, 0.1);
  EXPECT_NO_THROW(model.validate());

  const auto same = pasta::build_model(cb, pasta::estimate_distribution(cb, mixed),
                                       pasta::estimate_distribution(cb, mixed), 0.05, 0.1);
  EXPECT_TRUE(same.anomalies.ids.empty());

  EXPECT_PASTA_ERROR(pasta::build_model(cb, pasta::estimate_distribution(cb, mixed),
                                        pasta::estimate_distribution(cb, ref), 0.05, 1.5),
                     ErrorCode::kInvalidArgument);
}

}  // namespace
