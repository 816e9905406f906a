// Copyright 2026 The ssmrom Authors.
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

#include "pipeline/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "common.hpp"

namespace ssm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : v) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double to_double(const std::string& key, const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    fail(ErrorKind::kParse, "config: key '" + key + "' expects a number, got '" + s + "'");
  }
  return v;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text, const std::string& source) {
  KeyValueConfig cfg;
  cfg.source_ = source;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorKind::kParse, source + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) fail(ErrorKind::kParse, source + ":" + std::to_string(lineno) + ": empty key");
    cfg.values_[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : to_double(key, it->second);
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  const double v = get_double(key, fallback);
  if (v != static_cast<int>(v)) fail(ErrorKind::kParse, "config: key '" + key + "' expects an integer");
  return static_cast<int>(v);
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key,
                                                std::vector<double> fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  for (const auto& s : split_list(it->second)) out.push_back(to_double(key, s));
  return out;
}

std::vector<int> KeyValueConfig::get_ints(const std::string& key, std::vector<int> fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<int> out;
  for (const auto& s : split_list(it->second)) {
    const double v = to_double(key, s);
    if (v != static_cast<int>(v)) fail(ErrorKind::kParse, "config: key '" + key + "' expects integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

}  // namespace ssm
