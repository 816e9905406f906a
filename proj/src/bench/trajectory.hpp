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

#include <string>
#include <vector>

#include "common.hpp"

namespace ssm {

// Sampled states x~ = x - x0 with x = [q, qdot].
struct Trajectory {
  std::vector<double> times;
  Mat snapshots;  // 2n x N
  Vec origin;     // x0 = [q_s, 0]
  std::string label;
  std::string initial_condition;

  int state_dim() const { return static_cast<int>(snapshots.rows()); }
  int samples() const { return static_cast<int>(times.size()); }
  void validate() const;
};

// Text format:
//   n=<int> cols=time,x1..x<2n> origin=<file>
//   <t> <x1> ... <x2n>
// The origin vector goes to <file> (one value per line) next to the
// trajectory file.
void write_trajectory(const Trajectory& traj, const std::string& path);
Trajectory read_trajectory(const std::string& path);

// Packed binary twin: "SSMT" magic, int32 n, int64 rows, then rows of
// (time, x1..x2n) as little-endian doubles, then the 2n origin values.
void write_trajectory_binary(const Trajectory& traj, const std::string& path);
Trajectory read_trajectory_binary(const std::string& path);

}  // namespace ssm
