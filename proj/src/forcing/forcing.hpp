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

// Forced response of the normal form. With harmonic forcing f cos(Omega t)
// the modes are locked as z_j = u_j exp(i r_j Omega t); modes with r_j = 1
// keep the f_j / 2 component of the forcing and the remaining terms average
// out. Steady states of the rotating frame are continued in Omega.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "common.hpp"
#include "geometry/geometry.hpp"
#include "normalform/normalform.hpp"
#include "spectral/spectral.hpp"

namespace ssm::forcing {

// [0; M^-1 p] for a physical force amplitude p.
Vec first_order_force(const Mat& M, const Vec& p);

// xi-coordinate force B^-1 V^+ p for a first-order (2n) force vector.
CVec project_forcing(const Vec& p_first_order, const spectral::SpectralSubspace& subspace);

struct ForcingSpec {
  CVec unit_force;       // reduced force per unit base acceleration
  double a = 0.0;        // m/s^2
  double epsilon = 1.0;
  CVec force() const { return unit_force * (a * epsilon); }
};

enum class Stability { kStable, kUnstable, kMarginal };
const char* to_string(Stability s);

// Stable iff every eigenvalue has negative real part; within `marginal_tol`
// (relative to the Jacobian norm, floor 1) of zero counts as marginal.
Stability stability_flags(const Mat& rotating_jacobian, double marginal_tol = 1e-8);

// Physical response: sqrt(2) x RMS of one displacement component over a
// forcing period, reconstructed through t and the manifold.
struct Observation {
  const geometry::ManifoldParam* manifold = nullptr;
  int dof = 0;
  int samples_per_period = 64;
};

struct FRCSample {
  double omega = 0.0;
  CVec u;        // rotating-frame amplitudes
  Vec rho;
  Vec psi;       // arg u_j = theta_j - r_j Omega t
  double amplitude = 0.0;  // physical if an observation was given, else rho_1
  double zeta1 = 0.0;
  double residual = 0.0;
  Stability stability = Stability::kStable;
  bool outside_envelope = false;
};

struct FoldPoint {
  double omega = 0.0;
  double amplitude = 0.0;
  int after_sample = 0;
};

struct FRCBranch {
  std::vector<FRCSample> samples;
  std::vector<FoldPoint> folds;
  std::optional<FRCSample> peak;
  std::vector<int> lock;
  bool truncated = false;  // left the amplitude envelope
  bool aborted = false;    // step size fell below the floor
  std::vector<std::string> warnings;
};

struct ContinuationOptions {
  std::vector<int> lock;        // r_j; empty: rounded omega_j / omega_1
  double initial_step = 0.02;   // in scaled arclength
  double min_step = 1e-7;
  double max_step = 0.2;
  int max_steps = 4000;
  double newton_tol = 1e-10;    // scaled residual
  int max_newton = 12;
  double envelope_factor = 1.1; // truncate beyond this x amplitude_max (if known)
  bool refine = true;           // locate folds and the peak precisely
  Observation observation;
};

// Residual of the averaged rotating-frame system at (u, Omega).
CVec rotating_rhs(const normalform::NormalFormModel& model, const CVec& u, double omega,
                  const CVec& force, const std::vector<int>& lock);
Mat rotating_jacobian(const normalform::NormalFormModel& model, const CVec& u, double omega,
                      const std::vector<int>& lock);

FRCBranch continue_frc(const normalform::NormalFormModel& model, const ForcingSpec& spec,
                       double omega_lo, double omega_hi, const ContinuationOptions& opts = {});

// Amplitude at omega interpolated linearly between consecutive stable
// samples that bracket it; the largest such value when the branch crosses
// omega more than once. Empty when no stable segment covers omega.
std::optional<double> amplitude_at(const FRCBranch& branch, double omega);

double physical_amplitude(const normalform::NormalFormModel& model, const Observation& obs,
                          const CVec& u, const std::vector<int>& lock, double omega);

struct BackbonePoint {
  Vec rho;
  Vec psi;
  double omega = 0.0;
  double omega_normalized = 0.0;
  double zeta = 0.0;
  double amplitude = 0.0;
};

struct BackboneOptions {
  int mode = 0;
  bool slave_modes = false;  // solve the locked response of the other modes
  std::vector<int> lock;
  Observation observation;
};

// Frequency of `mode` as its amplitude sweeps. By default the other modes are
// held at zero; with slave_modes they take their phase-locked steady state.
std::vector<BackbonePoint> backbone(const normalform::NormalFormModel& model,
                                    const std::vector<double>& rho_values,
                                    const BackboneOptions& opts = {});

struct DampingPoint {
  double amplitude = 0.0;
  double rho = 0.0;
  double zeta = 0.0;
  double omega = 0.0;
};

std::vector<DampingPoint> modal_damping_curve(const normalform::NormalFormModel& model,
                                              const std::vector<BackbonePoint>& curve, int mode = 0);
std::vector<DampingPoint> modal_damping_curve(const normalform::NormalFormModel& model,
                                              const FRCBranch& branch, int mode = 0);

std::vector<int> default_lock(const normalform::NormalFormModel& model);

// Omega, Omega/omega0, amplitude, rho_1, rho_2, zeta_1, stability
void write_frc_table(const FRCBranch& branch, double omega0, const std::string& path);
void write_backbone_table(const std::vector<BackbonePoint>& curve, const std::string& path);
void write_damping_table(const std::vector<DampingPoint>& curve, const std::string& path);

}  // namespace ssm::forcing
