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
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "smoothmix/nn.hpp"

namespace smoothmix {

// Flat record of how a dataset was produced. Always has a "kind" key.
using Provenance = std::map<std::string, std::string>;

struct Dataset {
  Matrix inputs;            // d x N, one example per column
  std::vector<int> labels;  // N entries in [0, class_count)
  std::string split = "all";
  int class_count = 0;
  Provenance provenance;

  int size() const { return static_cast<int>(labels.size()); }
  int dim() const { return static_cast<int>(inputs.rows()); }
  Vector x(int i) const { return inputs.col(i); }

  // Throws std::invalid_argument on length mismatch, bad labels or
  // non-finite inputs.
  void validate() const;
};

// Two interleaved half circles: class 0 on (cos t, sin t), class 1 on
// (1 - cos t, 1/2 - sin t), t evenly spaced on [0, pi], with N(0, noise_std^2)
// jitter and a seeded shuffle.
Dataset gen_two_moons(int n, double noise_std, std::uint64_t seed);

// n points split as evenly as possible across the centers (center j gets
// points i with i % K == j), jittered by N(0, spread^2), then shuffled.
Dataset gen_gaussian_blobs(int n, const std::vector<Vector>& centers, double spread,
                           std::uint64_t seed);

// Reads an IDX image file (magic 0x00000803) and label file (0x00000801),
// scales pixels to [0, 1], and optionally keeps a class-stratified subsample
// of `subsample` examples (0 keeps everything).
Dataset load_mnist_idx(const std::filesystem::path& images_path,
                       const std::filesystem::path& labels_path, int subsample,
                       std::uint64_t seed);

// Indices of a class-stratified subsample: per-class quotas by largest
// remainder (ties to the lower class), members chosen by a seeded shuffle,
// returned in ascending order.
std::vector<int> stratified_indices(const std::vector<int>& labels, int class_count,
                                    int size, std::uint64_t seed);

Dataset subset(const Dataset& ds, const std::vector<int>& indices);

// Disjoint stratified train/test split of `ds`.
std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, int train_size,
                                             int test_size, std::uint64_t seed);

// Rebuilds a dataset from its provenance record.
Dataset regenerate_dataset(const Provenance& provenance);

// FNV-1a 64 of a file's bytes, hex encoded.
std::string file_digest(const std::filesystem::path& path);

}  // namespace smoothmix
