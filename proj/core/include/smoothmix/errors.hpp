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
#include <stdexcept>
#include <string>

namespace smoothmix {

// Raised when a vector/matrix does not have the dimension an operation needs.
class DimensionMismatch : public std::invalid_argument {
 public:
  DimensionMismatch(const std::string& what_for, long expected, long actual)
      : std::invalid_argument(what_for + ": expected dimension " +
                              std::to_string(expected) + ", got " +
                              std::to_string(actual)),
        expected_(expected),
        actual_(actual) {}

  long expected() const { return expected_; }
  long actual() const { return actual_; }

 private:
  long expected_;
  long actual_;
};

// Invalid user-supplied configuration. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// IDX parsing failures. Each failure mode is its own type so callers can
// tell a wrong file from a damaged one.
class IdxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MagicMismatch : public IdxError {
 public:
  MagicMismatch(const std::string& path, std::uint32_t expected,
                std::uint32_t actual);
  std::uint32_t expected() const { return expected_; }
  std::uint32_t actual() const { return actual_; }

 private:
  std::uint32_t expected_;
  std::uint32_t actual_;
};

class TruncatedPayload : public IdxError {
 public:
  TruncatedPayload(const std::string& path, std::uint64_t expected_bytes,
                   std::uint64_t actual_bytes);
};

class CountMismatch : public IdxError {
 public:
  CountMismatch(std::uint64_t images, std::uint64_t labels);
};

}  // namespace smoothmix
