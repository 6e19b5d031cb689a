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

#include "pasta/error.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "pasta/parallel.hpp"
#include "pasta/random.hpp"

namespace pasta {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kOk: return "Ok";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kTruncated: return "Truncated";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kValueOutOfRange: return "ValueOutOfRange";
    case ErrorCode::kMissingFile: return "MissingFile";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kEmptyManifest: return "EmptyManifest";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kCorrupt: return "Corrupt";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kDegenerateData: return "DegenerateData";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kKMismatch: return "KMismatch";
    case ErrorCode::kEmptyMask: return "EmptyMask";
    case ErrorCode::kBadDims: return "BadDims";
    case ErrorCode::kBagTooSmall: return "BagTooSmall";
    case ErrorCode::kAllClassesUndefined: return "AllClassesUndefined";
    case ErrorCode::kPlacementFailure: return "PlacementFailure";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kInternal: return "Internal";
  }
  return "Unknown";
}

bool is_io_error(ErrorCode code) noexcept {
  return code == ErrorCode::kIo || code == ErrorCode::kMissingFile;
}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

namespace {
std::atomic<bool> g_warnings_enabled{true};
std::mutex g_warn_mutex;
std::atomic<int> g_threads{1};
}  // namespace

void warn(const std::string& message) {
  if (!g_warnings_enabled.load(std::memory_order_relaxed)) return;
  std::lock_guard<std::mutex> lock(g_warn_mutex);
  std::fprintf(stderr, "pasta: warning: %s\n", message.c_str());
}

void set_warnings_enabled(bool enabled) noexcept {
  g_warnings_enabled.store(enabled, std::memory_order_relaxed);
}

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * 3.14159265358979323846 * u2;
  cached_ = r * std::sin(theta);
  has_cached_ = true;
  return r * std::cos(theta);
}

void set_thread_count(int n) noexcept {
  g_threads.store(n < 1 ? 1 : n, std::memory_order_relaxed);
}

int thread_count() noexcept { return g_threads.load(std::memory_order_relaxed); }

void parallel_for(std::size_t n,
                  const std::function<void(std::size_t)>& body) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr first_error;
  std::size_t first_index = n;
  std::mutex error_mutex;
  auto run = [&] {
    while (!stop.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        // Indices are claimed in order, so the lowest failing index is always
        // reached and the reported error does not depend on scheduling.
        std::lock_guard<std::mutex> lock(error_mutex);
        if (i < first_index) {
          first_index = i;
          first_error = std::current_exception();
        }
        stop.store(true);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace pasta
