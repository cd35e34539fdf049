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

#include "smoothmix_tools/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "smoothmix/errors.hpp"

namespace smoothmix::tools {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) parts.push_back(trim(item));
  return parts;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& text, const char* type) {
  throw ConfigError("config key '" + key + "': cannot parse '" + text + "' as " + type);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text, const char* type) {
  T value{};
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || text.empty()) bad_value(key, text, type);
  return value;
}

}  // namespace

FlatConfig FlatConfig::parse(const std::string& text, const std::string& origin) {
  FlatConfig cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(number) + ": expected 'key = value'");
    }
    const std::string key = trim(body.substr(0, eq));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(number) + ": empty key");
    if (cfg.entries_.count(key) != 0) {
      throw ConfigError(origin + ":" + std::to_string(number) + ": duplicate key '" + key + "'");
    }
    cfg.entries_[key] = trim(body.substr(eq + 1));
    cfg.lines_[key] = number;
  }
  return cfg;
}

FlatConfig FlatConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  FlatConfig cfg = parse(text.str(), path.string());
  cfg.base_dir_ = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  return cfg;
}

bool FlatConfig::has(const std::string& key) const { return entries_.count(key) != 0; }

void FlatConfig::set(const std::string& key, const std::string& value) { entries_[key] = value; }

const std::string& FlatConfig::raw(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

std::string FlatConfig::get_string(const std::string& key) const { return raw(key); }

std::string FlatConfig::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? raw(key) : fallback;
}

double FlatConfig::get_double(const std::string& key) const {
  return parse_number<double>(key, raw(key), "a real number");
}

double FlatConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::optional<double> FlatConfig::get_optional_double(const std::string& key) const {
  if (!has(key) || raw(key) == "none") return std::nullopt;
  return get_double(key);
}

std::int64_t FlatConfig::get_int(const std::string& key) const {
  return parse_number<std::int64_t>(key, raw(key), "an integer");
}

std::int64_t FlatConfig::get_int(const std::string& key, std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t FlatConfig::get_uint(const std::string& key, std::uint64_t fallback) const {
  return has(key) ? parse_number<std::uint64_t>(key, raw(key), "an unsigned integer") : fallback;
}

bool FlatConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = raw(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v, "a boolean");
}

std::vector<double> FlatConfig::get_doubles(const std::string& key,
                                            std::vector<double> fallback) const {
  if (!has(key)) return fallback;
  std::vector<double> out;
  for (const auto& item : split(raw(key), ',')) {
    out.push_back(parse_number<double>(key, item, "a list of real numbers"));
  }
  return out;
}

std::vector<int> FlatConfig::get_ints(const std::string& key, std::vector<int> fallback) const {
  if (!has(key)) return fallback;
  std::vector<int> out;
  const std::string& text = raw(key);
  if (text.empty()) return out;
  for (const auto& item : split(text, ',')) {
    out.push_back(parse_number<int>(key, item, "a list of integers"));
  }
  return out;
}

std::vector<std::string> FlatConfig::get_strings(const std::string& key,
                                                 std::vector<std::string> fallback) const {
  if (!has(key)) return fallback;
  return split(raw(key), ',');
}

std::filesystem::path FlatConfig::get_path(const std::string& key) const {
  std::filesystem::path p = raw(key);
  if (p.is_relative()) p = base_dir_ / p;
  return p;
}

void FlatConfig::reject_unknown(const std::set<std::string>& known) const {
  std::string unknown;
  for (const auto& [key, value] : entries_) {
    if (known.count(key) != 0) continue;
    if (!unknown.empty()) unknown += ", ";
    unknown += key;
    if (auto it = lines_.find(key); it != lines_.end()) {
      unknown += " (line " + std::to_string(it->second) + ")";
    }
  }
  if (!unknown.empty()) throw ConfigError(origin_ + ": unknown config keys: " + unknown);
}

}  // namespace smoothmix::tools
