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

#include "smoothmix/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "smoothmix/errors.hpp"
#include "smoothmix/rng.hpp"

namespace smoothmix {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IdxError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<unsigned char>& bytes, std::size_t offset,
                        const std::string& path) {
  if (offset + 4 > bytes.size()) throw TruncatedPayload(path, offset + 4, bytes.size());
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void shuffle_columns(Dataset& ds, RngStream& rng) {
  const int n = ds.size();
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    ds.inputs.col(i).swap(ds.inputs.col(j));
    std::swap(ds.labels[static_cast<std::size_t>(i)], ds.labels[static_cast<std::size_t>(j)]);
  }
}

std::string digest_bytes(const std::vector<unsigned char>& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

void Dataset::validate() const {
  if (inputs.cols() != static_cast<Eigen::Index>(labels.size())) {
    throw DimensionMismatch("dataset labels", inputs.cols(), static_cast<long>(labels.size()));
  }
  if (class_count < 1) throw std::invalid_argument("dataset: class_count must be >= 1");
  for (int label : labels) {
    if (label < 0 || label >= class_count) throw std::invalid_argument("dataset: label out of range");
  }
  if (!inputs.allFinite()) throw std::invalid_argument("dataset: non-finite input");
}

Dataset gen_two_moons(int n, double noise_std, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("gen_two_moons: n must be >= 2");
  if (!(noise_std >= 0.0)) throw std::invalid_argument("gen_two_moons: noise_std must be >= 0");
  const int n_outer = n / 2;
  const int n_inner = n - n_outer;
  Dataset ds;
  ds.inputs = Matrix(2, n);
  ds.labels.resize(static_cast<std::size_t>(n));
  ds.class_count = 2;
  auto angle = [](int i, int count) {
    return count == 1 ? 0.0 : std::numbers::pi * i / (count - 1);
  };
  for (int i = 0; i < n_outer; ++i) {
    const double t = angle(i, n_outer);
    ds.inputs.col(i) << std::cos(t), std::sin(t);
    ds.labels[static_cast<std::size_t>(i)] = 0;
  }
  for (int i = 0; i < n_inner; ++i) {
    const double t = angle(i, n_inner);
    ds.inputs.col(n_outer + i) << 1.0 - std::cos(t), 0.5 - std::sin(t);
    ds.labels[static_cast<std::size_t>(n_outer + i)] = 1;
  }
  RngStream rng(seed, "two_moons", 0);
  shuffle_columns(ds, rng);
  if (noise_std > 0.0) {
    for (int j = 0; j < n; ++j) {
      ds.inputs(0, j) += noise_std * rng.normal();
      ds.inputs(1, j) += noise_std * rng.normal();
    }
  }
  ds.provenance = {{"kind", "two_moons"},
                   {"n", std::to_string(n)},
                   {"noise_std", fmt_double(noise_std)},
                   {"seed", std::to_string(seed)}};
  return ds;
}

Dataset gen_gaussian_blobs(int n, const std::vector<Vector>& centers, double spread,
                           std::uint64_t seed) {
  if (centers.size() < 2) throw std::invalid_argument("gen_gaussian_blobs: need >= 2 centers");
  if (n < 1) throw std::invalid_argument("gen_gaussian_blobs: n must be >= 1");
  if (!(spread >= 0.0)) throw std::invalid_argument("gen_gaussian_blobs: spread must be >= 0");
  const auto d = centers.front().size();
  for (const auto& c : centers) {
    if (c.size() != d) throw DimensionMismatch("gen_gaussian_blobs center", d, c.size());
  }
  const int k = static_cast<int>(centers.size());
  Dataset ds;
  ds.inputs = Matrix(d, n);
  ds.labels.resize(static_cast<std::size_t>(n));
  ds.class_count = k;
  for (int i = 0; i < n; ++i) {
    ds.inputs.col(i) = centers[static_cast<std::size_t>(i % k)];
    ds.labels[static_cast<std::size_t>(i)] = i % k;
  }
  RngStream rng(seed, "blobs", 0);
  shuffle_columns(ds, rng);
  if (spread > 0.0) {
    for (int j = 0; j < n; ++j) {
      for (Eigen::Index r = 0; r < d; ++r) ds.inputs(r, j) += spread * rng.normal();
    }
  }
  std::string encoded;
  for (const auto& c : centers) {
    if (!encoded.empty()) encoded += ';';
    for (Eigen::Index r = 0; r < d; ++r) {
      if (r > 0) encoded += ',';
      encoded += fmt_double(c[r]);
    }
  }
  ds.provenance = {{"kind", "blobs"},
                   {"n", std::to_string(n)},
                   {"centers", encoded},
                   {"spread", fmt_double(spread)},
                   {"seed", std::to_string(seed)}};
  return ds;
}

std::string file_digest(const std::filesystem::path& path) { return digest_bytes(read_file(path)); }

Dataset load_mnist_idx(const std::filesystem::path& images_path,
                       const std::filesystem::path& labels_path, int subsample,
                       std::uint64_t seed) {
  const auto images = read_file(images_path);
  const auto labels = read_file(labels_path);
  const std::string ipath = images_path.string();
  const std::string lpath = labels_path.string();

  const auto image_magic = read_be32(images, 0, ipath);
  if (image_magic != kImageMagic) throw MagicMismatch(ipath, kImageMagic, image_magic);
  const auto label_magic = read_be32(labels, 0, lpath);
  if (label_magic != kLabelMagic) throw MagicMismatch(lpath, kLabelMagic, label_magic);

  const std::uint64_t count = read_be32(images, 4, ipath);
  const std::uint64_t rows = read_be32(images, 8, ipath);
  const std::uint64_t cols = read_be32(images, 12, ipath);
  const std::uint64_t label_count = read_be32(labels, 4, lpath);
  if (count != label_count) throw CountMismatch(count, label_count);

  const std::uint64_t pixels = rows * cols;
  const std::uint64_t image_bytes = 16 + count * pixels;
  if (images.size() < image_bytes) throw TruncatedPayload(ipath, image_bytes, images.size());
  if (labels.size() < 8 + count) throw TruncatedPayload(lpath, 8 + count, labels.size());

  Dataset ds;
  ds.inputs = Matrix(static_cast<Eigen::Index>(pixels), static_cast<Eigen::Index>(count));
  ds.labels.resize(count);
  int max_label = 0;
  for (std::uint64_t i = 0; i < count; ++i) {
    for (std::uint64_t p = 0; p < pixels; ++p) {
      ds.inputs(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(i)) =
          images[16 + i * pixels + p] / 255.0;
    }
    ds.labels[i] = labels[8 + i];
    max_label = std::max(max_label, ds.labels[i]);
  }
  ds.class_count = std::max(10, max_label + 1);
  ds.provenance = {{"kind", "mnist_idx"},
                   {"images", ipath},
                   {"labels", lpath},
                   {"images_digest", digest_bytes(images)},
                   {"labels_digest", digest_bytes(labels)},
                   {"subsample", std::to_string(subsample)},
                   {"seed", std::to_string(seed)}};
  if (subsample > 0 && static_cast<std::uint64_t>(subsample) < count) {
    Provenance provenance = ds.provenance;
    ds = subset(ds, stratified_indices(ds.labels, ds.class_count, subsample, seed));
    ds.provenance = std::move(provenance);
  }
  return ds;
}

std::vector<int> stratified_indices(const std::vector<int>& labels, int class_count,
                                    int size, std::uint64_t seed) {
  const int total = static_cast<int>(labels.size());
  if (size < 0 || size > total) throw std::invalid_argument("stratified_indices: bad size");
  std::vector<std::vector<int>> members(static_cast<std::size_t>(class_count));
  for (int i = 0; i < total; ++i) members[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])].push_back(i);

  std::vector<int> quota(static_cast<std::size_t>(class_count));
  std::vector<std::pair<double, int>> remainders;
  int assigned = 0;
  for (int c = 0; c < class_count; ++c) {
    const double exact = static_cast<double>(size) * members[static_cast<std::size_t>(c)].size() / total;
    quota[static_cast<std::size_t>(c)] = static_cast<int>(std::floor(exact));
    assigned += quota[static_cast<std::size_t>(c)];
    remainders.emplace_back(exact - std::floor(exact), c);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; assigned < size && r < remainders.size(); ++r, ++assigned) {
    ++quota[static_cast<std::size_t>(remainders[r].second)];
  }

  std::vector<int> picked;
  picked.reserve(static_cast<std::size_t>(size));
  for (int c = 0; c < class_count; ++c) {
    auto pool = members[static_cast<std::size_t>(c)];
    RngStream rng(seed, "stratified", static_cast<std::uint64_t>(c));
    for (int i = static_cast<int>(pool.size()) - 1; i > 0; --i) {
      const auto j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    picked.insert(picked.end(), pool.begin(), pool.begin() + quota[static_cast<std::size_t>(c)]);
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

Dataset subset(const Dataset& ds, const std::vector<int>& indices) {
  Dataset out;
  out.inputs = Matrix(ds.inputs.rows(), static_cast<Eigen::Index>(indices.size()));
  out.labels.reserve(indices.size());
  for (std::size_t j = 0; j < indices.size(); ++j) {
    const int i = indices[j];
    if (i < 0 || i >= ds.size()) throw std::out_of_range("subset: index out of range");
    out.inputs.col(static_cast<Eigen::Index>(j)) = ds.inputs.col(i);
    out.labels.push_back(ds.labels[static_cast<std::size_t>(i)]);
  }
  out.split = ds.split;
  out.class_count = ds.class_count;
  out.provenance = ds.provenance;
  return out;
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, int train_size,
                                             int test_size, std::uint64_t seed) {
  if (train_size + test_size > ds.size()) {
    throw std::invalid_argument("stratified_split: split larger than dataset");
  }
  const auto train_idx = stratified_indices(ds.labels, ds.class_count, train_size, seed);
  std::vector<char> used(static_cast<std::size_t>(ds.size()), 0);
  for (int i : train_idx) used[static_cast<std::size_t>(i)] = 1;
  std::vector<int> rest;
  for (int i = 0; i < ds.size(); ++i) {
    if (!used[static_cast<std::size_t>(i)]) rest.push_back(i);
  }
  const Dataset remainder = subset(ds, rest);
  const auto test_local =
      stratified_indices(remainder.labels, ds.class_count, test_size, mix64(seed));
  Dataset train = subset(ds, train_idx);
  Dataset test = subset(remainder, test_local);
  for (auto* part : {&train, &test}) {
    part->provenance["split_seed"] = std::to_string(seed);
    part->provenance["split_train"] = std::to_string(train_size);
    part->provenance["split_test"] = std::to_string(test_size);
  }
  train.split = "train";
  test.split = "test";
  train.provenance["split_part"] = "train";
  test.provenance["split_part"] = "test";
  return {std::move(train), std::move(test)};
}

Dataset regenerate_dataset(const Provenance& provenance) {
  auto need = [&](const std::string& key) -> const std::string& {
    auto it = provenance.find(key);
    if (it == provenance.end()) throw std::invalid_argument("provenance: missing key " + key);
    return it->second;
  };
  const std::string& kind = need("kind");
  Dataset ds;
  if (kind == "two_moons") {
    ds = gen_two_moons(std::stoi(need("n")), std::stod(need("noise_std")),
                       std::stoull(need("seed")));
  } else if (kind == "blobs") {
    std::vector<Vector> centers;
    std::stringstream all(need("centers"));
    std::string item;
    while (std::getline(all, item, ';')) {
      std::vector<double> coords;
      std::stringstream row(item);
      std::string v;
      while (std::getline(row, v, ',')) coords.push_back(std::stod(v));
      centers.push_back(Eigen::Map<Vector>(coords.data(), static_cast<Eigen::Index>(coords.size())));
    }
    ds = gen_gaussian_blobs(std::stoi(need("n")), centers, std::stod(need("spread")),
                            std::stoull(need("seed")));
  } else if (kind == "mnist_idx") {
    ds = load_mnist_idx(need("images"), need("labels"), std::stoi(need("subsample")),
                        std::stoull(need("seed")));
    if (ds.provenance.at("images_digest") != need("images_digest") ||
        ds.provenance.at("labels_digest") != need("labels_digest")) {
      throw std::runtime_error("provenance: MNIST file digests changed");
    }
  } else {
    throw std::invalid_argument("provenance: unknown kind " + kind);
  }
  if (auto it = provenance.find("split_part"); it != provenance.end()) {
    auto [train, test] = stratified_split(ds, std::stoi(need("split_train")),
                                          std::stoi(need("split_test")),
                                          std::stoull(need("split_seed")));
    return it->second == "train" ? train : test;
  }
  return ds;
}

}  // namespace smoothmix
