// Copyright 2026 The sosmc Authors
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
#include <string_view>

namespace sosmc {

/// Deterministic 64-bit pseudo-random stream (splitmix64 core). Streams
/// are derived from (global_seed, trace_index, variable id) by avalanche
/// mixing, so every (trace, variable) pair owns an independent sequence
/// and re-running a trace reproduces every draw bit-exactly on any
/// platform.
class RngStream {
 public:
  RngStream() = default;
  explicit RngStream(std::uint64_t state) : state_(state) {}

  static RngStream derive(std::uint64_t global_seed, std::uint64_t trace_index,
                          std::string_view stream_id);

  std::uint64_t next_u64();

  /// Uniform double in [0, 1), 53-bit resolution.
  double next_unit();

  /// Unbiased uniform integer in [0, n); n == 0 means the full 2^64 range.
  std::uint64_t next_below(std::uint64_t n);

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_ = 0;
};

/// splitmix64 finalizer; also used to derive stream keys.
std::uint64_t mix64(std::uint64_t x);

/// FNV-1a 64-bit over bytes; stable across platforms.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace sosmc
