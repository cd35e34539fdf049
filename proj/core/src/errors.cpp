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

#include "smoothmix/errors.hpp"

#include <cstdio>

namespace smoothmix {

namespace {

std::string hex32(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "0x%08X", v);
  return buf;
}

}  // namespace

MagicMismatch::MagicMismatch(const std::string& path, std::uint32_t expected,
                             std::uint32_t actual)
    : IdxError(path + ": IDX magic mismatch, expected " + hex32(expected) +
               ", got " + hex32(actual)),
      expected_(expected),
      actual_(actual) {}

TruncatedPayload::TruncatedPayload(const std::string& path,
                                   std::uint64_t expected_bytes,
                                   std::uint64_t actual_bytes)
    : IdxError(path + ": truncated IDX payload, expected " +
               std::to_string(expected_bytes) + " bytes, found " +
               std::to_string(actual_bytes)) {}

CountMismatch::CountMismatch(std::uint64_t images, std::uint64_t labels)
    : IdxError("IDX count mismatch: " + std::to_string(images) +
               " images vs " + std::to_string(labels) + " labels") {}

}  // namespace smoothmix
