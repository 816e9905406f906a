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

// Desk-scale jointed bench: a chain of point masses between two grounding
// springs, with quadratic and cubic terms on every internal spring and
// Jenkins joints clamping selected masses to ground. Each joint owns a
// clamp DOF that is pressed onto its contact by the static (bolt) load.
//
//   ground -k- m0 -k- m1 -k- ... -k- m_{N-1} -k- ground
//                     |              |
//                  [joint]        [joint]   clamp DOFs N, N+1, ...
//
// The stiffness of the middle internal spring (between masses (N-1)/2 and
// (N-1)/2 + 1) is scaled so that the two slowest linearized modes satisfy
// omega_2 / omega_1 = target_ratio. The symmetric first mode barely
// stretches that spring while the antisymmetric second mode loads it fully.

#pragma once

#include <vector>

#include "bench/model.hpp"
#include "pipeline/config.hpp"

namespace ssm::bench {

struct ChainConfig {
  int masses = 6;
  double mass = 1.0;               // kg
  double spring = 4.0e4;           // N/m, internal springs
  double quadratic = 0.0;          // N/m^2 on each internal spring elongation
  double cubic = 0.0;              // N/m^3
  std::vector<int> joint_masses;   // chain indices clamped by a joint
  std::vector<double> preloads;    // N, clamp load per joint
  double mu = 0.6;
  double joint_stiffness = 0.0;    // k_p, N/m; 0 selects 0.15 * spring
  double clamp_stiffness_ratio = 0.01;  // clamp spring / k_p
  double contact_frequency_factor = 20.0;
  double damping_ratio = 0.004;    // Rayleigh, first two linearized modes
  double target_ratio = 2.0;
  double ratio_tolerance = 0.1;    // accepted |omega2/omega1 - target|
  bool tune = true;
  double mid_ratio = 1.0;          // middle spring / k when tune == false

  static ChainConfig defaults();
  static ChainConfig from(const KeyValueConfig& cfg);
};

struct BenchInfo {
  double mid_ratio = 0.0;
  double omega1 = 0.0;
  double omega2 = 0.0;
  double clamp_mass = 0.0;
  double rayleigh_alpha = 0.0;
  double rayleigh_beta = 0.0;
};

MechanicalModel build_benchmark_chain(const ChainConfig& config, BenchInfo* info = nullptr);

}  // namespace ssm::bench
