// Copyright 2026 The FairRec Authors.
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

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fairrec {

using UserId = std::uint32_t;
using ItemId = std::uint32_t;

enum class ErrorCode {
  kMalformedRecord,
  kEmptyInput,
  kDatasetEliminated,
  kInvalidArgument,
  kNonFinite,
  kNoNegativeAvailable,
  kEmptyValidation,
  kIo,
  kFormat,
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedRecord: return "malformed_record";
    case ErrorCode::kEmptyInput: return "empty_input";
    case ErrorCode::kDatasetEliminated: return "dataset_eliminated";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kNonFinite: return "non_finite";
    case ErrorCode::kNoNegativeAvailable: return "no_negative_available";
    case ErrorCode::kEmptyValidation: return "empty_validation";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kFormat: return "format";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Named random substreams derived from one master seed. FNV-1a over the name,
// mixed with the seed through splitmix64, so the derivation is stable across
// platforms and standard libraries.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stream) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : stream) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(master ^ splitmix64(h));
}

}  // namespace fairrec
