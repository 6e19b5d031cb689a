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

#ifndef PASTA_PARALLEL_HPP
#define PASTA_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace pasta {

// Process-wide worker count used by every parallel loop. Values < 1 are
// clamped to 1. Results never depend on this setting.
void set_thread_count(int n) noexcept;
int thread_count() noexcept;

// Runs body(i) for i in [0, n). Iterations must be independent. The first
// exception thrown by any iteration is rethrown on the calling thread after
// all workers have stopped.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace pasta

#endif  // PASTA_PARALLEL_HPP
