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

#include "bench/model.hpp"

namespace ssm::bench {

struct EquilibriumState {
  Vec q_s;
  JointState joints;
  double residual_norm = 0.0;
  int iterations = 0;
};

struct NewtonOptions {
  double tol = 1e-9;  // relative to max(1, |p_s|)
  int max_iterations = 100;
};

// Solves K q + f_g(q) + f_J(q) = p_s from q = 0 with a backtracking line
// search on the residual norm. Friction is evaluated in stick from zero
// anchors.
EquilibriumState static_equilibrium(const MechanicalModel& model, const NewtonOptions& opts = {});

struct Linearization {
  Mat A;      // 2n x 2n first-order matrix about x0 = [q_s, 0]
  Mat K_J;    // joint stiffness: k_p on contacting normal and stuck tangential DOFs
  Mat K_eff;  // K + d f_g/dq + K_J
};

Linearization linearize(const MechanicalModel& model, const EquilibriumState& eq);

}  // namespace ssm::bench
