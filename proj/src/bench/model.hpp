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

// Full-order jointed oscillator model:
//
//   M q'' + C q' + K q + f_g(q) + f_J(q, q') = p_s + p_dyn(t)
//
// f_g is a sparse polynomial with no linear part, f_J collects penalty
// contact and elastic-Coulomb (Jenkins) friction elements. Forces follow the
// left-hand-side convention: a positive entry resists positive displacement.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "common.hpp"

namespace ssm::bench {

struct Factor {
  int dof = 0;
  int power = 1;
};

// coeff * prod(q[dof]^power) added to component out_dof of f_g.
struct PolyTerm {
  int out_dof = 0;
  std::vector<Factor> factors;
  double coeff = 0.0;

  int degree() const;
  double eval(const Vec& q) const;
};

// Penalty contact plus a 1D or 2D Jenkins friction slider.
//   gap = q[dof_normal] - preload_gap, f_n = k_p * max(0, -gap)
// preload_gap is the initial interference: positive values press the pair
// together at q = 0. dof_tangent_v < 0 marks a 1D tangential element.
struct FrictionElement {
  int dof_normal = 0;
  int dof_tangent_u = 0;
  int dof_tangent_v = -1;
  double k_p = 1.0;
  double mu = 0.0;
  double preload_gap = 0.0;

  bool planar() const { return dof_tangent_v >= 0; }
};

// Stick anchors of every friction element; this is the only history the
// full-order flow carries besides (q, q').
struct JointState {
  std::vector<Eigen::Vector2d> anchors;

  static JointState zeros(std::size_t count) {
    return JointState{std::vector<Eigen::Vector2d>(count, Eigen::Vector2d::Zero())};
  }
};

struct MechanicalModel {
  int n = 0;
  Mat M, C, K;
  std::vector<PolyTerm> geom_force;
  std::vector<FrictionElement> friction;
  Vec static_load;
  Vec excitation;  // b: unit entries on base-driven DOFs
  std::string label;

  // Throws kInvalidArgument when an invariant is violated.
  void validate() const;
  JointState fresh_joint_state() const { return JointState::zeros(friction.size()); }
};

double normal_contact_force(double gap, double k_p);

struct FrictionForce {
  double f_tu = 0.0;
  double f_tv = 0.0;
  Eigen::Vector2d anchor = Eigen::Vector2d::Zero();
  bool slipping = false;
};

// Elastic-Coulomb element. The trial force k_p*(disp - anchor) is kept while
// it lies inside the cone |f| <= mu*f_n; otherwise the element slips with
// |f| = mu*f_n along the tangential velocity (or along the trial force when
// the velocity vanishes) and the anchor is moved so the force is continuous.
FrictionForce friction_force(double udot, double vdot, double f_n, double mu,
                             const Eigen::Vector2d& anchor,
                             const Eigen::Vector2d& tangential_disp, double k_p);

// Closest-point return mapping used by the implicit integrator. Returns the
// force, the updated anchor and d f / d disp.
struct ReturnMap {
  Eigen::Vector2d force = Eigen::Vector2d::Zero();
  Eigen::Vector2d anchor = Eigen::Vector2d::Zero();
  Eigen::Matrix2d tangent = Eigen::Matrix2d::Zero();
  Eigen::Vector2d dforce_dfn = Eigen::Vector2d::Zero();
  bool slipping = false;
};
ReturnMap jenkins_return_map(const Eigen::Vector2d& disp, const Eigen::Vector2d& anchor,
                             double f_n, double mu, double k_p, bool planar);

// f_g(q) and its Jacobian.
Vec geometric_force(const MechanicalModel& model, const Vec& q);
Mat geometric_jacobian(const MechanicalModel& model, const Vec& q);
// Path integral of f_g from 0 to q; the potential when f_g is conservative.
double geometric_potential(const MechanicalModel& model, const Vec& q);

struct JointForce {
  Vec force;                     // f_J scattered to DOFs
  Mat jacobian;                  // d f_J / d q (empty unless requested)
  JointState updated;            // anchors after the return mapping
  std::vector<bool> in_contact;
  std::vector<bool> slipping;
};

JointForce joint_force(const MechanicalModel& model, const Vec& q, const JointState& joints,
                       bool with_jacobian);

// f_g(q) + f_J(q, qdot) with the element anchors given by `joints`.
Vec internal_force(const MechanicalModel& model, const Vec& q, const Vec& qdot,
                   const JointState& joints);

// Per-element frictional power f_t . v_slip (W), zero for stuck or separated
// elements.
std::vector<double> dissipation_rate(const MechanicalModel& model, const Vec& q, const Vec& qdot,
                                     const JointState& joints);

// Energy bookkeeping: kinetic + linear elastic + geometric potential +
// penalty springs - static-load work.
double mechanical_energy(const MechanicalModel& model, const Vec& q, const Vec& qdot,
                         const JointState& joints);

// p_dyn amplitude for base excitation a cos(Omega t): -a M b.
Vec base_excitation(double a, const MechanicalModel& model);

}  // namespace ssm::bench
