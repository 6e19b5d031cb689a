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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pasta/error.hpp"
#include "pasta/parallel.hpp"
#include "pasta/random.hpp"

namespace pasta {
namespace {

constexpr std::uint64_t kSeedingStream = 0x6b6d2b2b;  // "km++"

void check_finite(FeatureView features) {
  for (std::size_t i = 0; i < features.data.size(); ++i) {
    if (!std::isfinite(features.data[i])) {
      fail(ErrorCode::kNonFinite, "non-finite feature at row " +
                                      std::to_string(i / features.dim));
    }
  }
}

bool rows_equal(std::span<const float> a, std::span<const float> b) {
  return std::equal(a.begin(), a.end(), b.begin());
}

// Stops scanning once `k` distinct rows have been seen.
std::size_t count_distinct_up_to(FeatureView features, std::size_t k) {
  std::vector<std::size_t> distinct;
  for (std::size_t i = 0; i < features.rows() && distinct.size() < k; ++i) {
    const auto row = features.row(i);
    const bool seen = std::any_of(distinct.begin(), distinct.end(), [&](std::size_t j) {
      return rows_equal(row, features.row(j));
    });
    if (!seen) distinct.push_back(i);
  }
  return distinct.size();
}

void validate_inputs(FeatureView features, std::uint32_t k, const MiniBatchConfig& cfg) {
  if (k < 2) fail(ErrorCode::kInvalidArgument, "cluster count must be at least 2");
  if (features.dim == 0) fail(ErrorCode::kBadDims, "feature dimension must be positive");
  if (cfg.max_epochs < 1) fail(ErrorCode::kInvalidArgument, "max_epochs must be at least 1");
  if (!(cfg.tol >= 0.0)) fail(ErrorCode::kInvalidArgument, "tol must be non-negative");
  if (cfg.batch_size < k) {
    fail(ErrorCode::kInvalidArgument, "batch size must be at least the cluster count");
  }
  if (features.rows() < k) {
    fail(ErrorCode::kTooFewSamples, std::to_string(features.rows()) +
                                        " samples cannot form " + std::to_string(k) +
                                        " clusters");
  }
  check_finite(features);
  if (count_distinct_up_to(features, k) < k) {
    fail(ErrorCode::kDegenerateData,
         "fewer than " + std::to_string(k) + " distinct feature vectors");
  }
}

struct Nearest {
  std::uint32_t index = 0;
  double distance = 0.0;
};

Nearest nearest(std::span<const double> centroids, std::uint32_t k, std::size_t dim,
                std::span<const float> x) {
  Nearest best{0, std::numeric_limits<double>::infinity()};
  for (std::uint32_t c = 0; c < k; ++c) {
    const double d = squared_distance(x, centroids.subspan(c * dim, dim));
    if (d < best.distance) best = {c, d};
  }
  return best;
}

}  // namespace

double squared_distance(std::span<const float> x, std::span<const double> c) {
  double sum = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double diff = static_cast<double>(x[j]) - c[j];
    sum += diff * diff;
  }
  return sum;
}

FeatureMatrix gather_features(const DatasetManifest& manifest) {
  std::vector<FeatureGrid> grids(manifest.size());
  parallel_for(manifest.size(), [&](std::size_t i) {
    grids[i] = read_feature_grid(manifest.records[i].features);
  });
  FeatureMatrix out;
  out.dim = manifest.dim;
  std::size_t total = 0;
  for (const auto& g : grids) total += g.data.size();
  out.data.reserve(total);
  for (const auto& g : grids) {
    if (g.dim != manifest.dim) fail(ErrorCode::kDimMismatch, "grid dim changed after manifest validation");
    out.append(g.data);
  }
  return out;
}

std::vector<double> kmeans_plus_plus(FeatureView features, std::uint32_t k,
                                     const MiniBatchConfig& cfg) {
  validate_inputs(features, k, cfg);
  const std::size_t n = features.rows();
  const std::size_t dim = features.dim;
  Rng rng(derive_seed(cfg.seed, kSeedingStream, 0));

  std::size_t m = cfg.init_sample_size == 0 ? n : std::min(cfg.init_sample_size, n);
  std::vector<std::size_t> sample(n);
  for (std::size_t i = 0; i < n; ++i) sample[i] = i;
  if (m < n) {
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(n - i));
      std::swap(sample[i], sample[j]);
    }
    sample.resize(m);
  }

  std::vector<double> centroids;
  centroids.reserve(static_cast<std::size_t>(k) * dim);
  auto add_center = [&](std::size_t row) {
    for (float v : features.row(row)) centroids.push_back(v);
  };

  add_center(sample[rng.uniform_index(m)]);
  std::vector<double> d2(m);
  auto refresh = [&](std::size_t from_center) {
    const std::span<const double> c(centroids.data() + from_center * dim, dim);
    for (std::size_t j = 0; j < m; ++j) {
      const double d = squared_distance(features.row(sample[j]), c);
      d2[j] = from_center == 0 ? d : std::min(d2[j], d);
    }
  };
  refresh(0);

  for (std::uint32_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (double d : d2) total += d;
    std::size_t chosen = m;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double cum = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        if (d2[j] <= 0.0) continue;
        cum += d2[j];
        chosen = j;
        if (cum > target) break;
      }
      add_center(sample[chosen]);
    } else {
      // The subsample has run out of distinct rows; take the row of the full
      // set farthest from the current centers.
      std::size_t best_row = 0;
      double best = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = nearest(centroids, c, dim, features.row(i)).distance;
        if (d > best) {
          best = d;
          best_row = i;
        }
      }
      if (best <= 0.0) fail(ErrorCode::kDegenerateData, "cannot seed distinct centroids");
      add_center(best_row);
    }
    refresh(c);
  }
  return centroids;
}

ClusterCodebook fit_codebook(FeatureView features, std::uint32_t k,
                             const MiniBatchConfig& cfg) {
  return fit_codebook_from(features, kmeans_plus_plus(features, k, cfg), k, cfg);
}

ClusterCodebook fit_codebook_from(FeatureView features,
                                  std::vector<double> initial_centroids,
                                  std::uint32_t k, const MiniBatchConfig& cfg) {
  validate_inputs(features, k, cfg);
  const std::size_t n = features.rows();
  const std::size_t dim = features.dim;
  if (initial_centroids.size() != static_cast<std::size_t>(k) * dim) {
    fail(ErrorCode::kDimMismatch, "initial centroids do not match k * dim");
  }

  ClusterCodebook cb;
  cb.k = k;
  cb.dim = static_cast<std::uint32_t>(dim);
  cb.seed = cfg.seed;
  cb.centroids = std::move(initial_centroids);
  cb.counts.assign(k, 0);

  const std::size_t batch = std::min(cfg.batch_size, n);
  std::vector<std::uint32_t> labels(n);
  std::vector<double> dist(n);
  std::vector<double> previous;

  for (std::uint32_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    previous = cb.centroids;
    // Learning rates restart each epoch, so a centroid ends the epoch at the
    // mean of the samples it absorbed during that epoch.
    std::fill(cb.counts.begin(), cb.counts.end(), 0);
    double sum_sq = 0.0;

    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t end = std::min(start + batch, n);
      parallel_for(end - start, [&](std::size_t off) {
        const std::size_t i = start + off;
        const Nearest nn = nearest(cb.centroids, k, dim, features.row(i));
        labels[i] = nn.index;
        dist[i] = nn.distance;
      });
      for (std::size_t i = start; i < end; ++i) {
        const std::uint32_t c = labels[i];
        const std::uint64_t count = ++cb.counts[c];
        double* centroid = cb.centroids.data() + static_cast<std::size_t>(c) * dim;
        const auto x = features.row(i);
        if (count == 1) {
          for (std::size_t j = 0; j < dim; ++j) centroid[j] = x[j];
        } else {
          const double rate = 1.0 / static_cast<double>(count);
          for (std::size_t j = 0; j < dim; ++j) centroid[j] += rate * (x[j] - centroid[j]);
        }
        sum_sq += dist[i];
      }
    }
    cb.inertia_history.push_back(sum_sq / static_cast<double>(n));

    // Empty clusters take the sample farthest from its assigned centroid.
    std::vector<std::size_t> reseeded;
    for (std::uint32_t c = 0; c < k; ++c) {
      if (cb.counts[c] != 0) continue;
      std::vector<double> gap(n);
      parallel_for(n, [&](std::size_t i) {
        gap[i] = squared_distance(features.row(i), cb.centroid(labels[i]));
      });
      std::size_t best_row = n;
      double best = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (std::find(reseeded.begin(), reseeded.end(), i) != reseeded.end()) continue;
        if (gap[i] > best) {
          best = gap[i];
          best_row = i;
        }
      }
      reseeded.push_back(best_row);
      const auto x = features.row(best_row);
      std::copy(x.begin(), x.end(), cb.centroids.begin() + static_cast<std::ptrdiff_t>(c * dim));
    }

    double displacement = 0.0;
    for (std::size_t j = 0; j < cb.centroids.size(); ++j) {
      const double d = cb.centroids[j] - previous[j];
      displacement += d * d;
    }
    displacement /= k;
    if (displacement < cfg.tol || displacement == 0.0) break;
  }
  return cb;
}

std::uint32_t assign(const ClusterCodebook& codebook, std::span<const float> vector) {
  if (vector.size() != codebook.dim) {
    fail(ErrorCode::kDimMismatch, "query has dim " + std::to_string(vector.size()) +
                                      ", codebook has " + std::to_string(codebook.dim));
  }
  return nearest(codebook.centroids, codebook.k, codebook.dim, vector).index;
}

PatchLabelMap assign_grid(const ClusterCodebook& codebook, const FeatureGrid& grid) {
  if (grid.dim != codebook.dim) {
    fail(ErrorCode::kDimMismatch, "grid has dim " + std::to_string(grid.dim) +
                                      ", codebook has " + std::to_string(codebook.dim));
  }
  PatchLabelMap map{grid.rows, grid.cols, std::vector<std::uint32_t>(grid.patch_count())};
  for (std::size_t i = 0; i < map.cells.size(); ++i) {
    map.cells[i] = nearest(codebook.centroids, codebook.k, codebook.dim, grid.patch(i)).index;
  }
  return map;
}

double inertia(const ClusterCodebook& codebook, FeatureView features) {
  if (features.rows() == 0) fail(ErrorCode::kEmptyInput, "inertia of an empty feature set");
  if (features.dim != codebook.dim) fail(ErrorCode::kDimMismatch, "feature dim differs from codebook");
  std::vector<double> d(features.rows());
  parallel_for(d.size(), [&](std::size_t i) {
    d[i] = nearest(codebook.centroids, codebook.k, codebook.dim, features.row(i)).distance;
  });
  double sum = 0.0;
  for (double v : d) sum += v;
  return sum / static_cast<double>(d.size());
}

}  // namespace pasta
