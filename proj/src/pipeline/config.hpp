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

#pragma once

#include <map>
#include <string>
#include <vector>

namespace ssm {

// Flat key = value configuration. '#' starts a comment; list values are
// separated by commas and/or whitespace. Keys are case-sensitive.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text, const std::string& source = "<string>");
  static KeyValueConfig load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;
  std::vector<int> get_ints(const std::string& key, std::vector<int> fallback) const;

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  std::string source_;
};

}  // namespace ssm
