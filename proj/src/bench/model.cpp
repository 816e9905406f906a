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

#include "bench/model.hpp"

#include <cmath>

namespace ssm::bench {

int PolyTerm::degree() const {
  int d = 0;
  for (const auto& f : factors) d += f.power;
  return d;
}

double PolyTerm::eval(const Vec& q) const {
  double v = coeff;
  for (const auto& f : factors) v *= std::pow(q[f.dof], f.power);
  return v;
}

void MechanicalModel::validate() const {
  require(n > 0, "model: n must be positive");
  require(M.rows() == n && M.cols() == n, "model: M has wrong shape");
  require(C.rows() == n && C.cols() == n, "model: C has wrong shape");
  require(K.rows() == n && K.cols() == n, "model: K has wrong shape");
  require(static_load.size() == n, "model: static_load has wrong length");
  require(excitation.size() == n, "model: excitation has wrong length");
  const double tol = 1e-10;
  require((M - M.transpose()).norm() <= tol * (1.0 + M.norm()), "model: M not symmetric");
  require((K - K.transpose()).norm() <= tol * (1.0 + K.norm()), "model: K not symmetric");
  require((C - C.transpose()).norm() <= tol * (1.0 + C.norm()), "model: C not symmetric");
  Eigen::LLT<Mat> llt(M);
  require(llt.info() == Eigen::Success, "model: M not positive definite");
  Eigen::SelfAdjointEigenSolver<Mat> ce(C, Eigen::EigenvaluesOnly);
  require(ce.eigenvalues().minCoeff() >= -1e-9 * (1.0 + C.norm()),
          "model: C not positive semidefinite");
  for (int i = 0; i < n; ++i) {
    require(excitation[i] == 0.0 || excitation[i] == 1.0, "model: excitation entries must be 0 or 1");
  }
  for (const auto& t : geom_force) {
    require(t.out_dof >= 0 && t.out_dof < n, "model: geometric term output DOF out of range");
    for (const auto& f : t.factors) {
      require(f.dof >= 0 && f.dof < n, "model: geometric term exponent references DOF " +
                                           std::to_string(f.dof) + " outside [0, " +
                                           std::to_string(n) + ")");
      require(f.power >= 1, "model: geometric term exponents must be positive");
    }
    require(t.degree() >= 2, "model: geometric force must have no linear part");
  }
  for (const auto& e : friction) {
    require(e.k_p > 0.0, "model: friction element k_p must be positive");
    require(e.mu >= 0.0, "model: friction element mu must be non-negative");
    require(e.dof_normal >= 0 && e.dof_normal < n, "model: friction normal DOF out of range");
    require(e.dof_tangent_u >= 0 && e.dof_tangent_u < n, "model: friction tangent DOF out of range");
    require(e.dof_tangent_v < n, "model: friction tangent v DOF out of range");
  }
}

double normal_contact_force(double gap, double k_p) {
  return gap < 0.0 ? -k_p * gap : 0.0;
}

namespace {

void check_finite(std::initializer_list<double> xs) {
  for (double x : xs) {
    if (!std::isfinite(x)) fail(ErrorKind::kInvalidArgument, "friction_force: non-finite input");
  }
}

}  // namespace

FrictionForce friction_force(double udot, double vdot, double f_n, double mu,
                             const Eigen::Vector2d& anchor,
                             const Eigen::Vector2d& tangential_disp, double k_p) {
  check_finite({udot, vdot, f_n, mu, anchor.x(), anchor.y(), tangential_disp.x(),
                tangential_disp.y(), k_p});
  require(k_p > 0.0 && mu >= 0.0, "friction_force: k_p > 0 and mu >= 0 required");
  FrictionForce out;
  if (f_n <= 0.0) {
    // Separated: no force, the anchor follows the surface.
    out.anchor = tangential_disp;
    return out;
  }
  const double cap = mu * f_n;
  const Eigen::Vector2d trial = k_p * (tangential_disp - anchor);
  const double tn = trial.norm();
  if (tn <= cap) {
    out.f_tu = trial.x();
    out.f_tv = trial.y();
    out.anchor = anchor;
    return out;
  }
  const Eigen::Vector2d vel(udot, vdot);
  const double speed = vel.norm();
  Eigen::Vector2d dir = trial / tn;
  if (speed > 0.0 && vel.dot(trial) > 0.0) dir = vel / speed;
  const Eigen::Vector2d f = cap * dir;
  out.f_tu = f.x();
  out.f_tv = f.y();
  out.anchor = tangential_disp - f / k_p;
  out.slipping = true;
  return out;
}

ReturnMap jenkins_return_map(const Eigen::Vector2d& disp, const Eigen::Vector2d& anchor,
                             double f_n, double mu, double k_p, bool planar) {
  ReturnMap rm;
  if (f_n <= 0.0) {
    rm.anchor = disp;
    return rm;
  }
  const double cap = mu * f_n;
  const Eigen::Vector2d trial = k_p * (disp - anchor);
  const double tn = trial.norm();
  // Ties go to stick.
  if (tn <= cap) {
    rm.force = trial;
    rm.anchor = anchor;
    rm.tangent = k_p * Eigen::Matrix2d::Identity();
    if (!planar) rm.tangent(1, 1) = 0.0;
    return rm;
  }
  const Eigen::Vector2d dir = trial / tn;
  rm.force = cap * dir;
  rm.anchor = disp - rm.force / k_p;
  rm.slipping = true;
  if (planar) {
    rm.tangent = (cap / tn) * k_p * (Eigen::Matrix2d::Identity() - dir * dir.transpose());
  }
  rm.dforce_dfn = mu * dir;
  return rm;
}

Vec geometric_force(const MechanicalModel& model, const Vec& q) {
  Vec f = Vec::Zero(model.n);
  for (const auto& t : model.geom_force) f[t.out_dof] += t.eval(q);
  return f;
}

Mat geometric_jacobian(const MechanicalModel& model, const Vec& q) {
  Mat J = Mat::Zero(model.n, model.n);
  for (const auto& t : model.geom_force) {
    for (std::size_t k = 0; k < t.factors.size(); ++k) {
      const auto& fk = t.factors[k];
      double d = t.coeff * fk.power * std::pow(q[fk.dof], fk.power - 1);
      for (std::size_t l = 0; l < t.factors.size(); ++l) {
        if (l != k) d *= std::pow(q[t.factors[l].dof], t.factors[l].power);
      }
      J(t.out_dof, fk.dof) += d;
    }
  }
  return J;
}

double geometric_potential(const MechanicalModel& model, const Vec& q) {
  double v = 0.0;
  for (const auto& t : model.geom_force) v += q[t.out_dof] * t.eval(q) / (t.degree() + 1);
  return v;
}

namespace {

Eigen::Vector2d tangential_disp(const FrictionElement& e, const Vec& q) {
  return {q[e.dof_tangent_u], e.planar() ? q[e.dof_tangent_v] : 0.0};
}

Eigen::Vector2d tangential_vel(const FrictionElement& e, const Vec& qdot) {
  return {qdot[e.dof_tangent_u], e.planar() ? qdot[e.dof_tangent_v] : 0.0};
}

double gap_of(const FrictionElement& e, const Vec& q) { return q[e.dof_normal] - e.preload_gap; }

}  // namespace

JointForce joint_force(const MechanicalModel& model, const Vec& q, const JointState& joints,
                       bool with_jacobian) {
  require(joints.anchors.size() == model.friction.size(), "joint_force: anchor count mismatch");
  JointForce out;
  out.force = Vec::Zero(model.n);
  if (with_jacobian) out.jacobian = Mat::Zero(model.n, model.n);
  out.updated = joints;
  out.in_contact.assign(model.friction.size(), false);
  out.slipping.assign(model.friction.size(), false);
  for (std::size_t i = 0; i < model.friction.size(); ++i) {
    const auto& e = model.friction[i];
    const double fn = normal_contact_force(gap_of(e, q), e.k_p);
    const ReturnMap rm =
        jenkins_return_map(tangential_disp(e, q), joints.anchors[i], fn, e.mu, e.k_p, e.planar());
    out.updated.anchors[i] = rm.anchor;
    out.in_contact[i] = fn > 0.0;
    out.slipping[i] = rm.slipping;
    if (fn <= 0.0) continue;
    out.force[e.dof_normal] -= fn;
    out.force[e.dof_tangent_u] += rm.force.x();
    if (e.planar()) out.force[e.dof_tangent_v] += rm.force.y();
    if (!with_jacobian) continue;
    Mat& J = out.jacobian;
    J(e.dof_normal, e.dof_normal) += e.k_p;
    const int tu = e.dof_tangent_u;
    const int tv = e.dof_tangent_v;
    J(tu, tu) += rm.tangent(0, 0);
    // d f_n / d q_normal = -k_p while in contact.
    J(tu, e.dof_normal) += -e.k_p * rm.dforce_dfn.x();
    if (e.planar()) {
      J(tu, tv) += rm.tangent(0, 1);
      J(tv, tu) += rm.tangent(1, 0);
      J(tv, tv) += rm.tangent(1, 1);
      J(tv, e.dof_normal) += -e.k_p * rm.dforce_dfn.y();
    }
  }
  return out;
}

Vec internal_force(const MechanicalModel& model, const Vec& q, const Vec& qdot,
                   const JointState& joints) {
  require(q.size() == model.n && qdot.size() == model.n, "internal_force: state dimension mismatch");
  for (const auto& t : model.geom_force) {
    for (const auto& f : t.factors) {
      if (f.dof < 0 || f.dof >= model.n) {
        fail(ErrorKind::kInvalidArgument,
             "internal_force: exponent references out-of-range DOF " + std::to_string(f.dof));
      }
    }
  }
  return geometric_force(model, q) + joint_force(model, q, joints, false).force;
}

std::vector<double> dissipation_rate(const MechanicalModel& model, const Vec& q, const Vec& qdot,
                                     const JointState& joints) {
  std::vector<double> out(model.friction.size(), 0.0);
  for (std::size_t i = 0; i < model.friction.size(); ++i) {
    const auto& e = model.friction[i];
    const double fn = normal_contact_force(gap_of(e, q), e.k_p);
    if (fn <= 0.0) continue;
    const double cap = e.mu * fn;
    const Eigen::Vector2d trial = e.k_p * (tangential_disp(e, q) - joints.anchors[i]);
    const double tn = trial.norm();
    if (cap <= 0.0 || tn < cap * (1.0 - 1e-9)) continue;
    const Eigen::Vector2d dir = trial / tn;
    // f . d(anchor)/dt with d(anchor)/dt = v_t - (d f/dt)/k_p on the slip surface.
    const double p = cap * (dir.dot(tangential_vel(e, qdot)) + e.mu * qdot[e.dof_normal]);
    out[i] = std::max(0.0, p);
  }
  return out;
}

double mechanical_energy(const MechanicalModel& model, const Vec& q, const Vec& qdot,
                         const JointState& joints) {
  double e = 0.5 * qdot.dot(model.M * qdot) + 0.5 * q.dot(model.K * q) +
             geometric_potential(model, q) - model.static_load.dot(q);
  for (std::size_t i = 0; i < model.friction.size(); ++i) {
    const auto& fe = model.friction[i];
    const double pen = std::max(0.0, -gap_of(fe, q));
    if (pen <= 0.0) continue;
    e += 0.5 * fe.k_p * pen * pen;
    e += 0.5 * fe.k_p * (tangential_disp(fe, q) - joints.anchors[i]).squaredNorm();
  }
  return e;
}

Vec base_excitation(double a, const MechanicalModel& model) {
  require(a >= 0.0, "base_excitation: a must be non-negative");
  return -a * (model.M * model.excitation);
}

}  // namespace ssm::bench
