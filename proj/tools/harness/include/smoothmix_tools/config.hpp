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
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace smoothmix::tools {

// Flat "key = value" configuration. Blank lines and lines starting with '#'
// are ignored; keys may contain dots. Every typed getter throws ConfigError
// naming the key and the offending text.
class FlatConfig {
 public:
  FlatConfig() = default;

  static FlatConfig parse(const std::string& text, const std::string& origin = "<string>");
  static FlatConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::optional<double> get_optional_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Comma-separated lists.
  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;
  std::vector<int> get_ints(const std::string& key, std::vector<int> fallback) const;
  std::vector<std::string> get_strings(const std::string& key,
                                       std::vector<std::string> fallback) const;

  // Resolves a path value relative to the directory of the config file.
  std::filesystem::path get_path(const std::string& key) const;

  // Throws ConfigError listing keys outside `known`, with their line numbers.
  void reject_unknown(const std::set<std::string>& known) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }
  const std::filesystem::path& base_dir() const { return base_dir_; }

 private:
  const std::string& raw(const std::string& key) const;

  std::map<std::string, std::string> entries_;
  std::map<std::string, int> lines_;
  std::string origin_ = "<string>";
  std::filesystem::path base_dir_ = ".";
};

}  // namespace smoothmix::tools
