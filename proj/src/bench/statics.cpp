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

#include "bench/statics.hpp"

#include <sstream>

namespace ssm::bench {

namespace {

struct Residual {
  Vec r;
  Mat J;
  JointState joints;
};

Residual static_residual(const MechanicalModel& model, const Vec& q, const JointState& start) {
  JointForce jf = joint_force(model, q, start, true);
  Residual res;
  res.r = model.K * q + geometric_force(model, q) + jf.force - model.static_load;
  res.J = model.K + geometric_jacobian(model, q) + jf.jacobian;
  res.joints = std::move(jf.updated);
  return res;
}

}  // namespace

EquilibriumState static_equilibrium(const MechanicalModel& model, const NewtonOptions& opts) {
  model.validate();
  const JointState start = model.fresh_joint_state();
  const double scale = std::max(1.0, model.static_load.norm());
  const double tol = opts.tol * scale;

  Vec q = Vec::Zero(model.n);
  Residual res = static_residual(model, q, start);
  double rn = res.r.norm();
  int it = 0;
  for (; it < opts.max_iterations && rn > tol; ++it) {
    Eigen::FullPivLU<Mat> lu(res.J);
    if (!lu.isInvertible()) {
      fail(ErrorKind::kSolver, "static_equilibrium: singular tangent stiffness");
    }
    const Vec dq = lu.solve(-res.r);
    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      Residual trial = static_residual(model, q + step * dq, start);
      const double tn = trial.r.norm();
      if (tn < (1.0 - 1e-4 * step) * rn || tn <= tol) {
        q += step * dq;
        res = std::move(trial);
        rn = tn;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  if (rn > tol) {
    std::ostringstream os;
    os << "static_equilibrium: Newton did not converge after " << it
       << " iterations, last residual " << rn;
    fail(ErrorKind::kSolver, os.str());
  }
  EquilibriumState eq;
  eq.q_s = q;
  eq.joints = res.joints;
  eq.residual_norm = rn;
  eq.iterations = it;
  return eq;
}

Linearization linearize(const MechanicalModel& model, const EquilibriumState& eq) {
  const int n = model.n;
  Eigen::LLT<Mat> llt(model.M);
  if (llt.info() != Eigen::Success) fail(ErrorKind::kNumeric, "linearize: singular mass matrix");

  Linearization lin;
  lin.K_J = Mat::Zero(n, n);
  for (std::size_t i = 0; i < model.friction.size(); ++i) {
    const auto& e = model.friction[i];
    const double fn = normal_contact_force(eq.q_s[e.dof_normal] - e.preload_gap, e.k_p);
    if (fn <= 0.0) continue;
    lin.K_J(e.dof_normal, e.dof_normal) += e.k_p;
    Eigen::Vector2d d(eq.q_s[e.dof_tangent_u], e.planar() ? eq.q_s[e.dof_tangent_v] : 0.0);
    const ReturnMap rm = jenkins_return_map(d, eq.joints.anchors[i], fn, e.mu, e.k_p, e.planar());
    if (rm.slipping) continue;
    lin.K_J(e.dof_tangent_u, e.dof_tangent_u) += e.k_p;
    if (e.planar()) lin.K_J(e.dof_tangent_v, e.dof_tangent_v) += e.k_p;
  }
  lin.K_eff = model.K + geometric_jacobian(model, eq.q_s) + lin.K_J;
  lin.A = Mat::Zero(2 * n, 2 * n);
  lin.A.topRightCorner(n, n).setIdentity();
  lin.A.bottomLeftCorner(n, n) = -llt.solve(lin.K_eff);
  lin.A.bottomRightCorner(n, n) = -llt.solve(model.C);
  return lin;
}

}  // namespace ssm::bench
