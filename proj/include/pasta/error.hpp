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

#ifndef PASTA_ERROR_HPP
#define PASTA_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace pasta {

// Numeric values are mirrored by pasta_status in pasta.h; keep them in sync.
enum class ErrorCode : int {
  kOk = 0,
  kBadMagic = 1,
  kTruncated = 2,
  kNonFinite = 3,
  kUnsupportedFormat = 4,
  kValueOutOfRange = 5,
  kMissingFile = 6,
  kDimMismatch = 7,
  kEmptyManifest = 8,
  kVersionMismatch = 9,
  kCorrupt = 10,
  kTooFewSamples = 11,
  kDegenerateData = 12,
  kEmptyInput = 13,
  kKMismatch = 14,
  kEmptyMask = 15,
  kBadDims = 16,
  kBagTooSmall = 17,
  kAllClassesUndefined = 18,
  kPlacementFailure = 19,
  kInvalidArgument = 20,
  kIo = 21,
  kInternal = 22,
};

std::string_view error_code_name(ErrorCode code) noexcept;

// True for failures caused by the filesystem rather than by the data.
bool is_io_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

// Warnings go to stderr unless silenced. Used for recoverable data issues
// such as dropped empty masks.
void warn(const std::string& message);
void set_warnings_enabled(bool enabled) noexcept;

}  // namespace pasta

#endif  // PASTA_ERROR_HPP
