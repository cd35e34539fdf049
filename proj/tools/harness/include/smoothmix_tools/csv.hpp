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
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace smoothmix::tools {

// Malformed or schema-violating CSV input.
class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shortest decimal text that round-trips the double.
std::string format_double(double value);

// Comma-separated output with a header row. Fields are never quoted, so
// they must not contain commas or newlines.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

  void row(const std::vector<std::string>& fields);
  std::size_t columns() const { return header_.size(); }

 private:
  std::filesystem::path path_;
  std::vector<std::string> header_;
  std::ofstream out_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a column; throws CsvError when absent.
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
  std::int64_t integer(std::size_t row, const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

// Throws CsvError unless the header equals `expected` exactly.
void require_header(const CsvTable& table, const std::vector<std::string>& expected,
                    const std::string& what);

}  // namespace smoothmix::tools
