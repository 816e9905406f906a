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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "bench/chain.hpp"
#include "bench/integrator.hpp"
#include "bench/model.hpp"
#include "bench/statics.hpp"
#include "bench/trajectory.hpp"
#include "oracles.hpp"
#include "spectral/spectral.hpp"

using namespace ssm;
using namespace ssm::bench;

namespace {

MechanicalModel linear_two_dof(double k, double kc, double m, double c_ratio = 0.0) {
  MechanicalModel md;
  md.n = 2;
  md.M = m * Mat::Identity(2, 2);
  md.K.resize(2, 2);
  md.K << k + kc, -kc, -kc, k + kc;
  md.C = c_ratio * md.K;
  md.static_load = Vec::Zero(2);
  md.excitation = Vec::Ones(2);
  return md;
}

// Chain mass 0 on a ground spring, clamp DOF 1 pressed down by a static load.
MechanicalModel single_joint(double load, double kp = 1e4, double mu = 0.5) {
  MechanicalModel md;
  md.n = 2;
  md.M = Mat::Identity(2, 2);
  md.K = Mat::Zero(2, 2);
  md.K(0, 0) = 1e4;
  md.K(1, 1) = 1e2;
  md.C = 1e-3 * md.K;
  md.static_load = Vec::Zero(2);
  md.static_load[1] = -load;
  md.excitation = Vec::Zero(2);
  md.excitation[0] = 1.0;
  FrictionElement fe;
  fe.dof_normal = 1;
  fe.dof_tangent_u = 0;
  fe.k_p = kp;
  fe.mu = mu;
  md.friction.push_back(fe);
  return md;
}

}  // namespace

TEST_SUITE("bench") {

TEST_CASE("friction_force slipping follows the velocity direction") {
  const Eigen::Vector2d far(1.0, 0.0);
  auto f = friction_force(0.1, 0.0, 10.0, 0.6, Eigen::Vector2d::Zero(), far, 1e7);
  CHECK(f.slipping);
  CHECK(f.f_tu == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(f.f_tv == doctest::Approx(0.0));
  f = friction_force(3.0, 4.0, 10.0, 0.6, Eigen::Vector2d::Zero(), Eigen::Vector2d(1.0, 1.0), 1e7);
  CHECK(f.f_tu == doctest::Approx(3.6).epsilon(1e-14));
  CHECK(f.f_tv == doctest::Approx(4.8).epsilon(1e-14));
  CHECK(std::hypot(f.f_tu, f.f_tv) == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("friction_force stick balances the elastic force") {
  const Eigen::Vector2d anchor(0.25, 0.0);
  const double kp = 1e3;
  const Eigen::Vector2d disp = anchor + Eigen::Vector2d(2.0 / kp, 0.0);
  const auto f = friction_force(0.0, 0.0, 10.0, 0.6, anchor, disp, kp);
  CHECK_FALSE(f.slipping);
  CHECK(f.f_tu == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.anchor == anchor);
}

TEST_CASE("friction_force cap transition keeps the force continuous") {
  const double kp = 1e3, fn = 10.0, mu = 0.6;
  const Eigen::Vector2d disp(0.05, 0.0);
  const auto f = friction_force(1.0, 0.0, fn, mu, Eigen::Vector2d::Zero(), disp, kp);
  CHECK(f.slipping);
  // The moved anchor reproduces the capped force elastically.
  CHECK(kp * (disp.x() - f.anchor.x()) == doctest::Approx(mu * fn).epsilon(1e-12));
}

TEST_CASE("friction_force rejects non-finite input") {
  CHECK_THROWS_AS(friction_force(NAN, 0.0, 1.0, 0.5, Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(), 1.0),
                  Error);
}

TEST_CASE("normal contact force is a one-sided penalty") {
  CHECK(normal_contact_force(0.0, 1e7) == 0.0);
  CHECK(normal_contact_force(-1e-5, 1e7) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(normal_contact_force(1e-4, 1e7) == 0.0);
  const auto f = friction_force(1.0, 0.0, normal_contact_force(1e-4, 1e7), 0.5, Eigen::Vector2d::Zero(),
                                Eigen::Vector2d(1.0, 0.0), 1e7);
  CHECK(f.f_tu == 0.0);
  CHECK(f.f_tv == 0.0);
}

TEST_CASE("friction cone holds on random evaluations") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double fn = std::abs(u(rng)) * 100.0;
    const double mu = std::abs(u(rng));
    const double kp = std::pow(10.0, 2.0 + 6.0 * std::abs(u(rng)));
    const Eigen::Vector2d a(u(rng) * 1e-3, u(rng) * 1e-3), d(u(rng) * 1e-3, u(rng) * 1e-3);
    const auto f = friction_force(u(rng), u(rng), fn, mu, a, d, kp);
    const auto r = jenkins_return_map(d, a, fn, mu, kp, true);
    const double cap = mu * fn;
    worst = std::max(worst, std::hypot(f.f_tu, f.f_tv) - cap * (1.0 + 1e-12));
    worst = std::max(worst, r.force.norm() - cap * (1.0 + 1e-12));
  }
  CHECK(worst <= 0.0);
}

TEST_CASE("Jenkins loop dissipates mu f_n times four slip amplitudes") {
  const double mu = 0.5, fn = 20.0, kp = 1e4, A = 5e-3;
  Eigen::Vector2d anchor = Eigen::Vector2d::Zero();
  const int steps = 20000;
  double work = 0.0;
  double f_prev = 0.0;
  double u_prev = 0.0;
  // Second cycle, after the virgin loading branch.
  for (int k = 1; k <= 2 * steps; ++k) {
    const double u = A * std::sin(2.0 * std::numbers::pi * k / steps);
    const auto r = jenkins_return_map(Eigen::Vector2d(u, 0.0), anchor, fn, mu, kp, false);
    anchor = r.anchor;
    if (k > steps) work += 0.5 * (r.force.x() + f_prev) * (u - u_prev);
    f_prev = r.force.x();
    u_prev = u;
  }
  CHECK(work == doctest::Approx(oracle::jenkins_loop_work(mu, fn, kp, A)).epsilon(1e-3));
}

TEST_CASE("dissipation rate is slip force times slip speed") {
  MechanicalModel md = single_joint(10.0, 1e4, 0.6);
  const EquilibriumState eq = static_equilibrium(md);
  const double fn = normal_contact_force(eq.q_s[1], 1e4);
  Vec q = eq.q_s;
  Vec qd = Vec::Zero(2);
  // Stuck: zero power.
  CHECK(dissipation_rate(md, q, qd, eq.joints)[0] == 0.0);
  // Far past the cap and moving at 0.01 m/s.
  q[0] += 1.0;
  qd[0] = 0.01;
  const auto p = dissipation_rate(md, q, qd, eq.joints);
  CHECK(p[0] == doctest::Approx(0.6 * fn * 0.01).epsilon(1e-9));
  CHECK(fn > 0.0);
}

TEST_CASE("internal force examples") {
  MechanicalModel md = linear_two_dof(1.0, 0.5, 1.0);
  CHECK(internal_force(md, Vec::Zero(2), Vec::Zero(2), md.fresh_joint_state()).norm() == 0.0);
  PolyTerm t;
  t.out_dof = 1;
  t.factors = {{0, 3}};
  t.coeff = 5.0;
  md.geom_force.push_back(t);
  Vec q(2);
  q << 2.0, 0.0;
  const Vec f = internal_force(md, q, Vec::Zero(2), md.fresh_joint_state());
  CHECK(f[1] == doctest::Approx(40.0));
  CHECK(f[0] == 0.0);
  md.geom_force[0].factors = {{2, 1}, {0, 2}};
  CHECK_THROWS_AS(md.validate(), Error);
}

TEST_CASE("internal force is the gradient of the stored energy in stick") {
  ChainConfig cfg = ChainConfig::defaults();
  const MechanicalModel md = build_benchmark_chain(cfg);
  const EquilibriumState eq = static_equilibrium(md);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec q = eq.q_s;
  for (int i = 0; i < md.n; ++i) q[i] += 1e-5 * u(rng);
  const Vec zero = Vec::Zero(md.n);
  // Stored energy without the linear springs and the load potential.
  auto stored = [&](const Vec& x) {
    return mechanical_energy(md, x, zero, eq.joints) - 0.5 * x.dot(md.K * x) + md.static_load.dot(x);
  };
  const Vec f = internal_force(md, q, zero, eq.joints);
  const JointForce jf = joint_force(md, q, eq.joints, false);
  for (bool s : jf.slipping) REQUIRE_FALSE(s);
  for (int i = 0; i < md.n; ++i) {
    const double h = 1e-9;
    Vec qp = q, qm = q;
    qp[i] += h;
    qm[i] -= h;
    const double fd = (stored(qp) - stored(qm)) / (2.0 * h);
    CHECK(f[i] == doctest::Approx(fd).epsilon(1e-5).scale(std::abs(f.maxCoeff())));
  }
}

TEST_CASE("Jacobians agree with central differences on the smooth branch") {
  const MechanicalModel md = build_benchmark_chain(ChainConfig::defaults());
  const EquilibriumState eq = static_equilibrium(md);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    Vec q = eq.q_s;
    for (int i = 0; i < md.n; ++i) q[i] += 1e-4 * u(rng);
    const JointForce jf = joint_force(md, q, eq.joints, true);
    bool smooth = true;
    for (bool s : jf.slipping) smooth = smooth && !s;
    if (!smooth) continue;
    const Mat J = geometric_jacobian(md, q) + jf.jacobian;
    Mat Jfd(md.n, md.n);
    for (int i = 0; i < md.n; ++i) {
      const double h = 1e-7 * std::max(1e-4, std::abs(q[i]));
      Vec qp = q, qm = q;
      qp[i] += h;
      qm[i] -= h;
      Jfd.col(i) = (geometric_force(md, qp) + joint_force(md, qp, eq.joints, false).force -
                    geometric_force(md, qm) - joint_force(md, qm, eq.joints, false).force) /
                   (2.0 * h);
    }
    CHECK((J - Jfd).norm() <= 1e-6 * J.norm());
  }
}

TEST_CASE("static equilibrium examples") {
  MechanicalModel md = linear_two_dof(2.0, 1.0, 1.0);
  EquilibriumState eq = static_equilibrium(md);
  CHECK(eq.q_s.norm() == 0.0);
  md.static_load << 1.0, -3.0;
  eq = static_equilibrium(md);
  const Vec exact = md.K.lu().solve(md.static_load);
  CHECK((eq.q_s - exact).norm() <= 1e-12 * exact.norm());

  const MechanicalModel chain = build_benchmark_chain(ChainConfig::defaults());
  eq = static_equilibrium(chain);
  const Vec r = chain.K * eq.q_s + geometric_force(chain, eq.q_s) +
                joint_force(chain, eq.q_s, eq.joints, false).force - chain.static_load;
  CHECK(r.norm() < 1e-9 * chain.static_load.norm());
  CHECK(eq.residual_norm < 1e-9 * chain.static_load.norm());
}

TEST_CASE("linearize adds k_p on contacting normal and stuck tangential DOFs") {
  const double kp = 1e4;
  MechanicalModel md = single_joint(10.0, kp);
  EquilibriumState eq = static_equilibrium(md);
  Linearization lin = linearize(md, eq);
  CHECK(lin.K_J(0, 0) == doctest::Approx(kp));
  CHECK(lin.K_J(1, 1) == doctest::Approx(kp));
  CHECK(lin.K_J(0, 1) == 0.0);
  CHECK((lin.K_eff - md.K - lin.K_J).norm() == doctest::Approx(0.0));
  const auto sp = spectral::eigen_sorted(lin.A);
  for (const auto& l : sp.eigenvalues) CHECK(l.real() < 0.0);

  // A lifting load separates the contact.
  md.static_load[1] = 10.0;
  eq = static_equilibrium(md);
  lin = linearize(md, eq);
  CHECK(lin.K_J.norm() == 0.0);
}

TEST_CASE("linearize of a friction-free model is the structural A-matrix") {
  const double k = 4.0, kc = 1.5, m = 2.0;
  const MechanicalModel md = linear_two_dof(k, kc, m);
  const Linearization lin = linearize(md, static_equilibrium(md));
  Mat A = Mat::Zero(4, 4);
  A.topRightCorner(2, 2).setIdentity();
  A.bottomLeftCorner(2, 2) = -md.K / m;
  CHECK((lin.A - A).norm() <= 1e-14 * A.norm());
  const auto sp = spectral::eigen_sorted(lin.A, spectral::ModeOrdering::kFrequency);
  CHECK(sp.frequency(0) == doctest::Approx(oracle::two_dof_w1(k, m)).epsilon(1e-10));
  CHECK(sp.frequency(1) == doctest::Approx(oracle::two_dof_w2(k, kc, m)).epsilon(1e-10));
}

TEST_CASE("simulate: zero state stays zero") {
  const MechanicalModel md = build_benchmark_chain(ChainConfig::defaults());
  const EquilibriumState eq = static_equilibrium(md);
  SimulationOptions opts;
  opts.output_dt = 1e-2;
  const auto r = simulate(md, eq, Vec::Zero(2 * md.n), std::nullopt, 0.0, 0.2, opts);
  CHECK(r.trajectory.snapshots.norm() == 0.0);
}

TEST_CASE("simulate: linear modal motion stays in its plane") {
  const MechanicalModel md = linear_two_dof(1e4, 3e3, 1.0, 1e-4);
  const EquilibriumState eq = static_equilibrium(md);
  const auto sp = spectral::eigen_sorted(linearize(md, eq).A);
  const auto sub = spectral::select_subspace(sp, std::vector<int>{1});
  SimulationOptions opts;
  opts.rel_tol = 1e-9;
  opts.output_dt = 1e-3;
  const Vec x0 = 1e-3 * sub.V.col(0);
  const auto r = simulate(md, eq, x0, std::nullopt, 0.0, 0.5, opts);
  const Mat P = Mat::Identity(4, 4) - sub.V * sub.pseudo_inverse;
  double worst = 0.0;
  for (int k = 0; k < r.trajectory.samples(); ++k) {
    worst = std::max(worst, (P * r.trajectory.snapshots.col(k)).norm() / x0.norm());
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("simulate: error follows the tolerance on a smooth problem") {
  MechanicalModel md;
  md.n = 1;
  const double w0 = 2.0 * std::numbers::pi * 10.0, zeta = 0.02;
  md.M = Mat::Identity(1, 1);
  md.K = Mat::Constant(1, 1, w0 * w0);
  md.C = Mat::Constant(1, 1, 2.0 * zeta * w0);
  md.static_load = Vec::Zero(1);
  md.excitation = Vec::Ones(1);
  const EquilibriumState eq = static_equilibrium(md);
  Vec x0(2);
  x0 << 1.0, 0.0;
  auto error = [&](double tol) {
    SimulationOptions opts;
    opts.rel_tol = tol;
    opts.output_dt = 1e-3;
    const auto r = simulate(md, eq, x0, std::nullopt, 0.0, 0.5, opts);
    double e = 0.0;
    for (int k = 0; k < r.trajectory.samples(); ++k) {
      e = std::max(e, std::abs(r.trajectory.snapshots(0, k) -
                               oracle::one_dof_decay(zeta, w0, 1.0, r.trajectory.times[k])));
    }
    return e;
  };
  const double e1 = error(1e-5);
  const double e2 = error(1e-6);
  const double e3 = error(1e-7);
  CHECK(e2 < e1);
  CHECK(e3 < e2);
  // Second order with error control: a tenfold tolerance cut gains at least 3x.
  CHECK(e1 / e3 > 9.0);
}

TEST_CASE("simulate: damped energy never increases and the audit closes") {
  const MechanicalModel md = build_benchmark_chain(ChainConfig::defaults());
  const EquilibriumState eq = static_equilibrium(md);
  const auto sp = spectral::eigen_sorted(linearize(md, eq).A);
  const auto sub = spectral::select_subspace(sp, std::vector<int>{0, 1});
  Vec x0 = sub.V.col(0) + 0.5 * sub.V.col(2);
  x0 *= 3e-3 / x0.head(md.n).cwiseAbs().maxCoeff();
  SimulationOptions opts;
  opts.rel_tol = 1e-7;
  opts.output_dt = 1e-3;
  opts.energy_audit = true;
  const auto r = simulate(md, eq, x0, std::nullopt, 0.0, 1.0, opts);
  CHECK(r.audit.friction_work > 0.0);
  CHECK(std::abs(r.audit.residual()) < 1e-3 * r.audit.dissipated());
  CHECK(r.audit.e_end < r.audit.e_start);
  CHECK(r.audit.damping_work > 0.0);
}

TEST_CASE("base excitation is -a M b") {
  MechanicalModel md = linear_two_dof(1.0, 1.0, 1.0);
  md.M = Eigen::Vector2d(2.0, 3.0).asDiagonal();
  md.excitation << 1.0, 0.0;
  const Vec p = base_excitation(1.0, md);
  CHECK(p[0] == -2.0);
  CHECK(p[1] == 0.0);
  CHECK(base_excitation(0.0, md).norm() == 0.0);
}

TEST_CASE("benchmark chain") {
  BenchInfo info;
  const MechanicalModel md = build_benchmark_chain(ChainConfig::defaults(), &info);
  CHECK(md.n >= 6);
  CHECK(md.n <= 20);
  CHECK(info.omega2 / info.omega1 == doctest::Approx(2.0).epsilon(1e-6));
  const auto eq = static_equilibrium(md);
  const auto lin = linearize(md, eq);
  CHECK(lin.K_J.norm() > 0.0);  // joints engaged under preload
  const auto sp = spectral::eigen_sorted(lin.A);
  const double ratio = sp.frequency(1) / sp.frequency(0);
  CHECK(ratio >= 1.9);
  CHECK(ratio <= 2.1);

  ChainConfig smooth = ChainConfig::defaults();
  smooth.joint_masses.clear();
  smooth.preloads.clear();
  const MechanicalModel s = build_benchmark_chain(smooth);
  CHECK(s.friction.empty());
  CHECK_FALSE(s.geom_force.empty());

  smooth.quadratic = 0.0;
  smooth.cubic = 0.0;
  const MechanicalModel lin_bench = build_benchmark_chain(smooth);
  CHECK(lin_bench.geom_force.empty());

  ChainConfig bad = ChainConfig::defaults();
  bad.target_ratio = 50.0;
  CHECK_THROWS_AS(build_benchmark_chain(bad), Error);
}

TEST_CASE("trajectory text and binary files round trip") {
  Trajectory t;
  t.times = {0.0, 0.5, 1.0};
  t.snapshots = Mat::Random(4, 3);
  t.origin = Vec::Random(4);
  t.label = "probe";
  const auto dir = std::filesystem::temp_directory_path();
  const std::string txt = (dir / "ssmrom_traj_test.txt").string();
  const std::string bin = (dir / "ssmrom_traj_test.bin").string();
  write_trajectory(t, txt);
  write_trajectory_binary(t, bin);
  const Trajectory a = read_trajectory(txt);
  const Trajectory b = read_trajectory_binary(bin);
  CHECK((a.snapshots - t.snapshots).norm() <= 1e-15 * t.snapshots.norm());
  CHECK(b.snapshots == t.snapshots);
  CHECK(b.times == t.times);
  Trajectory bad = t;
  bad.times = {0.0, 0.0, 1.0};
  CHECK_THROWS_AS(bad.validate(), Error);
}

}  // TEST_SUITE
