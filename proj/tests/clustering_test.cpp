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

#include "pasta/clustering.hpp"

#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pasta/parallel.hpp"
#include "test_util.hpp"

namespace {

using pasta::ClusterCodebook;
using pasta::ErrorCode;
using pasta::FeatureMatrix;
using pasta::MiniBatchConfig;

FeatureMatrix matrix(std::size_t dim, std::vector<float> values) {
  FeatureMatrix m;
  m.dim = dim;
  m.data = std::move(values);
  return m;
}

oracle::Matrix to_rows(const FeatureMatrix& m) {
  oracle::Matrix out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.view().row(i);
    out.emplace_back(r.begin(), r.end());
  }
  return out;
}

oracle::Matrix to_rows(const std::vector<double>& flat, std::size_t dim) {
  oracle::Matrix out;
  for (std::size_t i = 0; i < flat.size(); i += dim) {
    out.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(i),
                     flat.begin() + static_cast<std::ptrdiff_t>(i + dim));
  }
  return out;
}

FeatureMatrix random_blobs(std::mt19937_64& gen, std::size_t n, std::size_t dim,
                           std::size_t groups, double spread) {
  std::uniform_real_distribution<double> center(-10.0, 10.0);
  std::normal_distribution<double> noise(0.0, spread);
  oracle::Matrix centers(groups, std::vector<double>(dim));
  for (auto& c : centers) {
    for (auto& v : c) v = center(gen);
  }
  FeatureMatrix m;
  m.dim = dim;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = centers[i % groups];
    for (std::size_t j = 0; j < dim; ++j) m.data.push_back(static_cast<float>(c[j] + noise(gen)));
  }
  return m;
}

ClusterCodebook codebook_of(std::uint32_t dim, std::vector<double> centroids) {
  ClusterCodebook cb;
  cb.dim = dim;
  cb.k = static_cast<std::uint32_t>(centroids.size() / dim);
  cb.centroids = std::move(centroids);
  cb.counts.assign(cb.k, 0);
  return cb;
}

TEST(Assign, NearestCentroid) {
  const auto cb = codebook_of(2, {0, 0, 10, 10});
  const float q[] = {1, 1};
  EXPECT_EQ(pasta::assign(cb, q), 0u);
  const float far[] = {9, 8};
  EXPECT_EQ(pasta::assign(cb, far), 1u);
}

TEST(Assign, TiesGoToSmallestIndex) {
  const auto cb = codebook_of(2, {10, 10, 0, 0, 10, 10});
  const float mid[] = {5, 5};
  EXPECT_EQ(pasta::assign(cb, mid), 0u);
  const float on_dup[] = {10, 10};
  EXPECT_EQ(pasta::assign(cb, on_dup), 0u);
}

TEST(Assign, MatchesExhaustiveScan) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-5, 5);
  std::vector<double> flat(5 * 3);
  for (auto& v : flat) v = u(gen);
  const auto cb = codebook_of(3, flat);
  const auto centers = to_rows(flat, 3);
  for (int q = 0; q < 100; ++q) {
    std::vector<float> x(3);
    std::vector<double> xd(3);
    for (int j = 0; j < 3; ++j) {
      x[j] = static_cast<float>(u(gen));
      xd[j] = x[j];
    }
    EXPECT_EQ(pasta::assign(cb, x), oracle::nearest(centers, xd));
  }
}

TEST(Assign, DimMismatch) {
  const auto cb = codebook_of(2, {0, 0, 1, 1});
  const float q[] = {1, 2, 3};
  EXPECT_PASTA_ERROR(pasta::assign(cb, q), ErrorCode::kDimMismatch);
}

TEST(AssignGrid, CellwiseEqualsAssign) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<float> u(-1, 1);
  pasta::FeatureGrid g;
  g.rows = 3;
  g.cols = 3;
  g.dim = 2;
  for (int i = 0; i < 18; ++i) g.data.push_back(u(gen));
  const auto cb = codebook_of(2, {0.5, 0.5, -0.5, -0.5, 0.5, -0.5, -0.5, 0.5});
  const auto map = pasta::assign_grid(cb, g);
  ASSERT_EQ(map.cells.size(), 9u);
  for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(map.cells[i], pasta::assign(cb, g.patch(i)));

  pasta::FeatureGrid flat = g;
  for (std::size_t i = 0; i < flat.data.size(); i += 2) {
    flat.data[i] = 0.25f;
    flat.data[i + 1] = -0.75f;
  }
  const auto constant = pasta::assign_grid(cb, flat);
  for (auto c : constant.cells) EXPECT_EQ(c, constant.cells[0]);
}

TEST(Inertia, Arithmetic) {
  const auto cb = codebook_of(2, {0, 0, 100, 100});
  const auto one = matrix(2, {2, 0});
  EXPECT_DOUBLE_EQ(pasta::inertia(cb, one.view()), 4.0);
  const auto same = matrix(2, {0, 0, 100, 100});
  EXPECT_DOUBLE_EQ(pasta::inertia(cb, same.view()), 0.0);
  EXPECT_PASTA_ERROR(pasta::inertia(cb, pasta::FeatureView{{}, 2}), ErrorCode::kEmptyInput);
}

TEST(FitCodebook, TwoTightGroupsMatchLloyd) {
  const auto m = matrix(2, {0.1f, 0.0f, -0.1f, 0.05f, 0.0f, -0.1f,
                            10.1f, 10.0f, 9.9f, 10.05f, 10.0f, 9.9f});
  MiniBatchConfig cfg;
  cfg.batch_size = 64;
  cfg.tol = 0.0;
  cfg.seed = 11;
  const auto init = pasta::kmeans_plus_plus(m.view(), 2, cfg);
  const auto cb = pasta::fit_codebook_from(m.view(), init, 2, cfg);
  const auto ref = oracle::lloyd(to_rows(m), to_rows(init, 2), 100, 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    EXPECT_EQ(pasta::assign(cb, m.view().row(i)), ref.labels[i]);
  }
  EXPECT_NE(ref.labels[0], ref.labels[3]);
}

TEST(FitCodebook, FullBatchEqualsLloydOnRandomInstances) {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t dim = 1 + trial % 4;
    const std::uint32_t k = 2 + trial % 3;
    const auto m = random_blobs(gen, 40 + 20 * trial, dim, k + 1, 1.5);
    MiniBatchConfig cfg;
    cfg.batch_size = m.rows();
    cfg.tol = 0.0;
    cfg.max_epochs = 200;
    cfg.seed = static_cast<std::uint64_t>(trial);
    const auto init = pasta::kmeans_plus_plus(m.view(), k, cfg);
    const auto cb = pasta::fit_codebook_from(m.view(), init, k, cfg);
    const auto ref = oracle::lloyd(to_rows(m), to_rows(init, dim), 200, 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      ASSERT_EQ(pasta::assign(cb, m.view().row(i)), ref.labels[i]) << "trial " << trial;
    }
    EXPECT_NEAR(pasta::inertia(cb, m.view()), ref.inertia, 1e-9 * ref.inertia);
  }
}

TEST(FitCodebook, DistinctPointsBecomeCentroids) {
  const auto m = matrix(2, {0, 0, 3, 1, -2, 5, 7, 7});
  MiniBatchConfig cfg;
  cfg.tol = 0.0;
  const auto cb = pasta::fit_codebook(m.view(), 4, cfg);
  EXPECT_EQ(pasta::inertia(cb, m.view()), 0.0);
  EXPECT_EQ(cb.counts, (std::vector<std::uint64_t>{1, 1, 1, 1}));
}

TEST(FitCodebook, FullBatchInertiaHistoryNonIncreasing) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 5; ++trial) {
    const auto m = random_blobs(gen, 300, 3, 6, 3.0);
    MiniBatchConfig cfg;
    cfg.batch_size = m.rows();
    cfg.tol = 0.0;
    cfg.seed = static_cast<std::uint64_t>(trial);
    const auto cb = pasta::fit_codebook(m.view(), 4, cfg);
    ASSERT_FALSE(cb.inertia_history.empty());
    for (std::size_t e = 1; e < cb.inertia_history.size(); ++e) {
      EXPECT_LE(cb.inertia_history[e], cb.inertia_history[e - 1] * (1 + 1e-12));
    }
  }
}

TEST(FitCodebook, DeterministicAcrossRunsAndThreads) {
  std::mt19937_64 gen(99);
  const auto m = random_blobs(gen, 2000, 8, 5, 2.0);
  MiniBatchConfig cfg;
  cfg.batch_size = 256;
  cfg.seed = 42;
  pasta::set_thread_count(1);
  const auto a = pasta::fit_codebook(m.view(), 5, cfg);
  const auto b = pasta::fit_codebook(m.view(), 5, cfg);
  pasta::set_thread_count(4);
  const auto c = pasta::fit_codebook(m.view(), 5, cfg);
  pasta::set_thread_count(1);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  cfg.seed = 43;
  const auto d = pasta::fit_codebook(m.view(), 5, cfg);
  EXPECT_EQ(d.seed, 43u);
}

TEST(FitCodebook, RecoversSeparatedComponents) {
  std::mt19937_64 gen(17);
  const auto m = random_blobs(gen, 1000, 16, 4, 0.05);
  MiniBatchConfig cfg;
  cfg.batch_size = 128;
  const auto cb = pasta::fit_codebook(m.view(), 4, cfg);
  // Rows i and i + 4 share a component; distinct components never share a label.
  std::vector<std::uint32_t> label_of_group(4);
  for (std::size_t g = 0; g < 4; ++g) label_of_group[g] = pasta::assign(cb, m.view().row(g));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    EXPECT_EQ(pasta::assign(cb, m.view().row(i)), label_of_group[i % 4]);
  }
  std::sort(label_of_group.begin(), label_of_group.end());
  EXPECT_EQ(std::unique(label_of_group.begin(), label_of_group.end()), label_of_group.end());
}

TEST(FitCodebook, KeepsEveryClusterPopulated) {
  // Five points at one location and one far away, K = 3 forces a reseed of
  // any cluster k-means++ leaves empty.
  const auto m = matrix(1, {0, 0, 0, 0, 0.5f, 100});
  MiniBatchConfig cfg;
  cfg.batch_size = 6;
  const auto cb = pasta::fit_codebook(m.view(), 3, cfg);
  for (auto c : cb.counts) EXPECT_GT(c, 0u);
}

TEST(FitCodebook, Validation) {
  const auto m = matrix(1, {0, 1, 2});
  MiniBatchConfig cfg;
  EXPECT_PASTA_ERROR(pasta::fit_codebook(m.view(), 4, cfg), ErrorCode::kTooFewSamples);
  EXPECT_PASTA_ERROR(pasta::fit_codebook(m.view(), 1, cfg), ErrorCode::kInvalidArgument);
  const auto dup = matrix(1, {1, 1, 1, 2});
  EXPECT_PASTA_ERROR(pasta::fit_codebook(dup.view(), 3, cfg), ErrorCode::kDegenerateData);
  auto nan = matrix(1, {0, 1, std::numeric_limits<float>::quiet_NaN()});
  EXPECT_PASTA_ERROR(pasta::fit_codebook(nan.view(), 2, cfg), ErrorCode::kNonFinite);
  cfg.batch_size = 1;
  EXPECT_PASTA_ERROR(pasta::fit_codebook(m.view(), 2, cfg), ErrorCode::kInvalidArgument);
  cfg.batch_size = 16;
  cfg.tol = -1;
  EXPECT_PASTA_ERROR(pasta::fit_codebook(m.view(), 2, cfg), ErrorCode::kInvalidArgument);
  cfg.tol = 0;
  cfg.max_epochs = 0;
  EXPECT_PASTA_ERROR(pasta::fit_codebook(m.view(), 2, cfg), ErrorCode::kInvalidArgument);
}

TEST(KMeansPlusPlus, SeedsAreDataRowsAndDistinct) {
  std::mt19937_64 gen(8);
  const auto m = random_blobs(gen, 500, 4, 3, 1.0);
  MiniBatchConfig cfg;
  cfg.init_sample_size = 50;
  cfg.seed = 9;
  const auto seeds = pasta::kmeans_plus_plus(m.view(), 6, cfg);
  const auto rows = to_rows(seeds, 4);
  const auto data = to_rows(m);
  for (std::size_t c = 0; c < rows.size(); ++c) {
    EXPECT_NE(std::find(data.begin(), data.end(), rows[c]), data.end());
    for (std::size_t o = 0; o < c; ++o) EXPECT_NE(rows[c], rows[o]);
  }
  EXPECT_EQ(seeds, pasta::kmeans_plus_plus(m.view(), 6, cfg));
}

}  // namespace
