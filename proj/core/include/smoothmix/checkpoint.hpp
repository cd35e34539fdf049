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

#include <filesystem>
#include <iosfwd>

#include "smoothmix/nn.hpp"

namespace smoothmix {

// Binary checkpoint, all integers and doubles little-endian:
//
//   offset  size  field
//   0       8     magic "SMXCKPT\0"
//   8       4     u32 format version (currently 1)
//   12      8     u64 init seed
//   20      4     u32 layer count L
//   then per layer:
//           4     u32 rows (out)
//           4     u32 cols (in)
//           8*r*c f64 weights, row-major
//           8*r   f64 biases
//
// Activation is always ReLU on hidden layers; it is not stored.
inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(std::ostream& out, const ModelParams& params);
ModelParams read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params);
ModelParams load_checkpoint(const std::filesystem::path& path);

}  // namespace smoothmix
