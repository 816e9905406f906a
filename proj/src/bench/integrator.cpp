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

#include "bench/integrator.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace ssm::bench {

namespace {

const double kGamma = 2.0 - std::sqrt(2.0);
const double kDiag = kGamma / 2.0;  // shared implicit coefficient of both stages
const double kErrConst = (-3.0 * kGamma * kGamma + 4.0 * kGamma - 2.0) / (12.0 * (2.0 - kGamma));

class FirstOrderSystem {
 public:
  FirstOrderSystem(const MechanicalModel& model, const EquilibriumState& origin,
                   std::optional<HarmonicForcing> forcing)
      : model_(model), n_(model.n), q_s_(origin.q_s), forcing_(forcing) {
    llt_.compute(model.M);
    Minv_ = llt_.solve(Mat::Identity(n_, n_));
    // The origin is balanced exactly so that x~ = 0 is a fixed point.
    p_eff_ = structural_force(q_s_, origin.joints, nullptr, nullptr);
    if (forcing_) p_dyn_ = base_excitation(forcing_->a, model);
  }

  struct Eval {
    Vec f;
    JointState joints;
    Mat jac;
  };

  Eval operator()(double t, const Vec& x, const JointState& joints, bool with_jac) const {
    const Vec q = q_s_ + x.head(n_);
    const Vec v = x.tail(n_);
    Eval e;
    Mat Ks;
    Vec load = p_eff_;
    if (forcing_) load += p_dyn_ * std::cos(forcing_->omega * t);
    const Vec s = structural_force(q, joints, &e.joints, with_jac ? &Ks : nullptr);
    e.f.resize(2 * n_);
    e.f.head(n_) = v;
    e.f.tail(n_) = Minv_ * (load - s - model_.C * v);
    if (with_jac) {
      e.jac = Mat::Zero(2 * n_, 2 * n_);
      e.jac.topRightCorner(n_, n_).setIdentity();
      e.jac.bottomLeftCorner(n_, n_) = -Minv_ * Ks;
      e.jac.bottomRightCorner(n_, n_) = -Minv_ * model_.C;
    }
    return e;
  }

  double forcing_power(double t, const Vec& v) const {
    if (!forcing_) return 0.0;
    return std::cos(forcing_->omega * t) * p_dyn_.dot(v);
  }

  const Vec& p_dyn() const { return p_dyn_; }
  int n() const { return n_; }

 private:
  Vec structural_force(const Vec& q, const JointState& joints, JointState* updated,
                       Mat* jac) const {
    JointForce jf = joint_force(model_, q, joints, jac != nullptr);
    if (updated) *updated = std::move(jf.updated);
    if (jac) *jac = model_.K + geometric_jacobian(model_, q) + jf.jacobian;
    return model_.K * q + geometric_force(model_, q) + jf.force;
  }

  const MechanicalModel& model_;
  int n_;
  Vec q_s_;
  std::optional<HarmonicForcing> forcing_;
  Eigen::LLT<Mat> llt_;
  Mat Minv_;
  Vec p_eff_;
  Vec p_dyn_;
};

Vec hermite(const Vec& x0, const Vec& f0, const Vec& x1, const Vec& f1, double h, double s) {
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * x0 + h10 * h * f0 + h01 * x1 + h11 * h * f1;
}

struct StageResult {
  bool converged = false;
  Vec x;
  FirstOrderSystem::Eval eval;
};

// Solves X = c + kDiag*h*F(t, X) by Newton with the full Jacobian.
StageResult solve_stage(const FirstOrderSystem& sys, double t, double h, const Vec& c,
                        const Vec& guess, const JointState& joints, const Vec& weights) {
  StageResult r;
  Vec x = guess;
  const int dim = static_cast<int>(x.size());
  for (int it = 0; it < 15; ++it) {
    auto ev = sys(t, x, joints, true);
    const Vec g = x - c - kDiag * h * ev.f;
    const Mat Jg = Mat::Identity(dim, dim) - kDiag * h * ev.jac;
    const Vec dx = Eigen::PartialPivLU<Mat>(Jg).solve(-g);
    x += dx;
    const double dn = std::sqrt((dx.cwiseProduct(weights)).squaredNorm() / dim);
    if (!std::isfinite(dn)) return r;
    if (dn < 1e-3) {
      r.converged = true;
      r.eval = sys(t, x, joints, true);
      r.x = x;
      return r;
    }
  }
  return r;
}

}  // namespace

SimulationResult simulate(const MechanicalModel& model, const EquilibriumState& origin,
                          const Vec& initial_state, std::optional<HarmonicForcing> forcing,
                          double t0, double t1, const SimulationOptions& opts,
                          std::optional<JointState> initial_joints) {
  model.validate();
  const int n = model.n;
  const int dim = 2 * n;
  require(initial_state.size() == dim, "simulate: initial state must have length 2n");
  require(opts.rel_tol > 0.0, "simulate: rel_tol must be positive");
  require(t1 > t0, "simulate: empty time span");
  require(opts.output_dt > 0.0, "simulate: output_dt must be positive");
  if (forcing && forcing->a == 0.0) forcing.reset();

  const FirstOrderSystem sys(model, origin, forcing);
  JointState joints = initial_joints ? *initial_joints : origin.joints;
  require(joints.anchors.size() == model.friction.size(), "simulate: joint state size mismatch");

  // Absolute tolerance floors per block, grown with the largest state seen.
  double q_scale = initial_state.head(n).lpNorm<Eigen::Infinity>();
  double v_scale = initial_state.tail(n).lpNorm<Eigen::Infinity>();
  const Mat K_eff = linearize(model, origin).K_eff;
  {
    // Couple the blocks through the slowest linear frequency so that a state
    // starting at rest (or at zero displacement) still has a sensible floor.
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(0.5 * (K_eff + K_eff.transpose()), model.M,
                                                      Eigen::EigenvaluesOnly);
    const double w2 = ges.info() == Eigen::Success ? ges.eigenvalues().minCoeff() : 0.0;
    if (w2 > 0.0) {
      v_scale = std::max(v_scale, q_scale * std::sqrt(w2));
      q_scale = std::max(q_scale, v_scale / std::sqrt(w2));
    }
  }
  if (forcing) {
    Eigen::FullPivLU<Mat> lu(K_eff);
    const double qs = (lu.solve(sys.p_dyn())).lpNorm<Eigen::Infinity>();
    q_scale = std::max(q_scale, qs);
    v_scale = std::max(v_scale, qs * forcing->omega);
  }
  auto weights = [&](const Vec& a, const Vec& b) {
    Vec w(dim);
    const double qa = std::max(q_scale, 1e-300) * opts.rel_tol;
    const double va = std::max(v_scale, 1e-300) * opts.rel_tol;
    for (int i = 0; i < dim; ++i) {
      const double floor = i < n ? qa : va;
      w[i] = 1.0 / (floor + opts.rel_tol * std::max(std::abs(a[i]), std::abs(b[i])));
    }
    return w;
  };

  SimulationResult res;
  Trajectory& traj = res.trajectory;
  traj.origin = Vec::Zero(dim);
  traj.origin.head(n) = origin.q_s;
  const long n_out = static_cast<long>(std::floor((t1 - t0) / opts.output_dt * (1 + 1e-12))) + 1;
  traj.times.reserve(n_out);
  std::vector<Vec> samples;
  samples.reserve(n_out);
  long next_out = 0;
  auto out_time = [&](long k) { return t0 + k * opts.output_dt; };

  Vec x = initial_state;
  auto ev = sys(t0, x, joints, false);
  joints = ev.joints;
  Vec f = ev.f;
  traj.times.push_back(t0);
  samples.push_back(x);
  next_out = 1;

  if (opts.energy_audit) {
    res.audit.e_start = mechanical_energy(model, origin.q_s + x.head(n), x.tail(n), joints);
  }

  double h = opts.initial_step > 0.0 ? opts.initial_step : std::min(opts.output_dt, (t1 - t0) / 100.0);
  double t = t0;
  const double hmax = opts.max_step > 0.0 ? opts.max_step : (t1 - t0);
  const double gl_nodes[3] = {0.5 - std::sqrt(15.0) / 10.0, 0.5, 0.5 + std::sqrt(15.0) / 10.0};
  const double gl_weights[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

  while (t < t1 - 1e-14 * std::max(1.0, std::abs(t1))) {
    h = std::min({h, hmax, t1 - t});
    if (h < opts.min_step) {
      fail(ErrorKind::kSolver, fmt::format("simulate: step-size collapse at t = {:.9g} (h = {:.3g})", t, h));
    }
    const Vec w0 = weights(x, x);

    // Trapezoidal stage to t + gamma h.
    const Vec c1 = x + kDiag * h * f;
    StageResult s1 = solve_stage(sys, t + kGamma * h, h, c1, x + kGamma * h * f, joints, w0);
    StageResult s2;
    if (s1.converged) {
      // BDF2 stage to t + h.
      const double a = 1.0 / (kGamma * (2.0 - kGamma));
      const double b = (1.0 - kGamma) * (1.0 - kGamma) / (kGamma * (2.0 - kGamma));
      const Vec c2 = a * s1.x - b * x;
      const Vec guess = x + h * s1.eval.f;
      s2 = solve_stage(sys, t + h, h, c2, guess, s1.eval.joints, w0);
    }
    if (!s1.converged || !s2.converged) {
      ++res.rejected;
      h *= 0.25;
      continue;
    }
    const Vec& x1 = s2.x;
    const Vec& f1 = s2.eval.f;
    Vec est = 2.0 * kErrConst * h *
              (f / kGamma - s1.eval.f / (kGamma * (1.0 - kGamma)) + f1 / (1.0 - kGamma));
    // Stiff filtering of the estimate.
    est = Eigen::PartialPivLU<Mat>(Mat::Identity(dim, dim) - kDiag * h * s2.eval.jac).solve(est);
    const Vec w = weights(x, x1);
    double err = std::sqrt(est.cwiseProduct(w).squaredNorm() / dim);
    if (!std::isfinite(err)) err = 1e10;
    if (err > 1.0) {
      ++res.rejected;
      h *= std::max(0.2, 0.9 * std::pow(err, -1.0 / 3.0));
      continue;
    }

    const double t_new = t + h;
    if (opts.energy_audit) {
      double dw = 0.0;
      double pw = 0.0;
      for (int g = 0; g < 3; ++g) {
        const Vec xm = hermite(x, f, x1, f1, h, gl_nodes[g]);
        const Vec vm = xm.tail(n);
        dw += gl_weights[g] * vm.dot(model.C * vm);
        pw += gl_weights[g] * sys.forcing_power(t + gl_nodes[g] * h, vm);
      }
      res.audit.damping_work += h * dw;
      res.audit.forcing_work += h * pw;
      const Vec q1 = origin.q_s + x1.head(n);
      const JointState& jn = s2.eval.joints;
      for (std::size_t i = 0; i < model.friction.size(); ++i) {
        const auto& e = model.friction[i];
        const double fn = normal_contact_force(q1[e.dof_normal] - e.preload_gap, e.k_p);
        if (fn <= 0.0) continue;
        const Eigen::Vector2d d(q1[e.dof_tangent_u], e.planar() ? q1[e.dof_tangent_v] : 0.0);
        const Eigen::Vector2d force = e.k_p * (d - jn.anchors[i]);
        const Eigen::Vector2d slip = jn.anchors[i] - joints.anchors[i];
        res.audit.friction_work += std::max(0.0, force.dot(slip));
      }
    }

    while (next_out < n_out && out_time(next_out) <= t_new * (1 + 1e-14) + 1e-300) {
      const double s = (out_time(next_out) - t) / h;
      traj.times.push_back(out_time(next_out));
      samples.push_back(hermite(x, f, x1, f1, h, std::clamp(s, 0.0, 1.0)));
      ++next_out;
    }

    x = x1;
    f = f1;
    joints = s2.eval.joints;
    t = t_new;
    ++res.steps;
    q_scale = std::max(q_scale, x.head(n).lpNorm<Eigen::Infinity>());
    v_scale = std::max(v_scale, x.tail(n).lpNorm<Eigen::Infinity>());
    const double grow = err > 0.0 ? 0.9 * std::pow(err, -1.0 / 3.0) : 4.0;
    h *= std::clamp(grow, 0.2, 4.0);
  }

  traj.snapshots.resize(dim, static_cast<Eigen::Index>(samples.size()));
  for (std::size_t k = 0; k < samples.size(); ++k) traj.snapshots.col(k) = samples[k];
  res.final_state = x;
  res.final_joints = joints;
  if (opts.energy_audit) {
    res.audit.e_end = mechanical_energy(model, origin.q_s + x.head(n), x.tail(n), joints);
  }
  return res;
}

}  // namespace ssm::bench
