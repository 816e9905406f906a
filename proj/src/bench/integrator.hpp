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

#include <optional>

#include "bench/model.hpp"
#include "bench/statics.hpp"
#include "bench/trajectory.hpp"

namespace ssm::bench {

// Base excitation -a M b cos(omega t).
struct HarmonicForcing {
  double a = 0.0;
  double omega = 0.0;
};

struct SimulationOptions {
  double rel_tol = 1e-6;
  double output_dt = 1e-3;
  double initial_step = 0.0;  // 0: pick from output_dt
  double min_step = 1e-13;
  double max_step = 0.0;      // 0: unbounded
  bool energy_audit = false;
};

// Work terms accumulated along the run; for an exact flow
// (E1 - E0) + damping + friction - forcing = 0.
struct EnergyAudit {
  double e_start = 0.0;
  double e_end = 0.0;
  double damping_work = 0.0;
  double friction_work = 0.0;
  double forcing_work = 0.0;

  double dissipated() const { return damping_work + friction_work; }
  double residual() const { return e_end - e_start + damping_work + friction_work - forcing_work; }
};

struct SimulationResult {
  Trajectory trajectory;
  Vec final_state;  // x~ at t_end
  JointState final_joints;
  EnergyAudit audit;
  int steps = 0;
  int rejected = 0;
};

// Integrates the full-order model from x~(t0) = initial_state (relative to
// the static origin) with TR-BDF2, an L-stable second-order implicit scheme
// with embedded error control. Friction anchors are advanced by the return
// mapping at each stage. Output is sampled every output_dt by cubic Hermite
// interpolation.
SimulationResult simulate(const MechanicalModel& model, const EquilibriumState& origin,
                          const Vec& initial_state, std::optional<HarmonicForcing> forcing,
                          double t0, double t1, const SimulationOptions& opts,
                          std::optional<JointState> initial_joints = std::nullopt);

}  // namespace ssm::bench
