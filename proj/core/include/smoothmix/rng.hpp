// Copyright 2026 The SmoothMix Authors
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
#include <random>
#include <string_view>

namespace smoothmix {

// 64-bit FNV-1a. Used to turn purpose tags ("certify", "train/example", ...)
// into integers for stream derivation.
std::uint64_t fnv1a64(std::string_view text);

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Stream id for (purpose tag, index):
//   mix64(mix64(fnv1a64(tag)) ^ (index + 0x9e3779b97f4a7c15)).
// Every random quantity in the toolkit is drawn from a stream keyed by
// (master_seed, derive_stream_id(tag, index)), so results never depend on
// execution order or worker count.
std::uint64_t derive_stream_id(std::string_view tag, std::uint64_t index);

// Identifies a random stream; enough to regenerate anything drawn from it.
struct StreamId {
  std::uint64_t master_seed = 0;
  std::uint64_t stream = 0;

  friend bool operator==(const StreamId&, const StreamId&) = default;
};

// A seeded engine with its provenance attached. The engine is seeded with
// mix64(master_seed ^ mix64(stream)).
class RngStream {
 public:
  explicit RngStream(StreamId id);
  RngStream(std::uint64_t master_seed, std::string_view tag, std::uint64_t index);

  const StreamId& id() const { return id_; }

  double normal();                 // N(0, 1)
  double uniform();                // U[0, 1)
  double uniform(double lo, double hi);
  std::uint64_t next_u64();
  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  std::mt19937_64& engine() { return engine_; }

 private:
  StreamId id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace smoothmix
