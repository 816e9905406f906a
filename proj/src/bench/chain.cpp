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

#include "bench/chain.hpp"

#include <cmath>

#include <fmt/format.h>

#include "bench/statics.hpp"

namespace ssm::bench {

ChainConfig ChainConfig::defaults() {
  ChainConfig c;
  c.masses = 6;
  c.quadratic = 3.0e6;
  c.cubic = 4.0e9;
  c.joint_masses = {1, 4};
  c.preloads = {2.0, 3.0};
  c.joint_stiffness = 800.0;
  return c;
}

ChainConfig ChainConfig::from(const KeyValueConfig& cfg) {
  ChainConfig c = defaults();
  c.masses = cfg.get_int("chain.masses", c.masses);
  c.mass = cfg.get_double("chain.mass", c.mass);
  c.spring = cfg.get_double("chain.spring", c.spring);
  c.quadratic = cfg.get_double("chain.quadratic", c.quadratic);
  c.cubic = cfg.get_double("chain.cubic", c.cubic);
  c.joint_masses = cfg.get_ints("joint.masses", c.joint_masses);
  c.preloads = cfg.get_doubles("joint.preloads", c.preloads);
  c.mu = cfg.get_double("joint.mu", c.mu);
  c.joint_stiffness = cfg.get_double("joint.stiffness", c.joint_stiffness);
  c.clamp_stiffness_ratio = cfg.get_double("joint.clamp_stiffness_ratio", c.clamp_stiffness_ratio);
  c.contact_frequency_factor =
      cfg.get_double("joint.contact_frequency_factor", c.contact_frequency_factor);
  c.damping_ratio = cfg.get_double("damping.ratio", c.damping_ratio);
  c.target_ratio = cfg.get_double("tuning.target_ratio", c.target_ratio);
  c.ratio_tolerance = cfg.get_double("tuning.tolerance", c.ratio_tolerance);
  c.tune = cfg.get_int("tuning.enabled", c.tune ? 1 : 0) != 0;
  c.mid_ratio = cfg.get_double("tuning.mid_ratio", c.mid_ratio);
  return c;
}

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Adds +/- c (q_a - q_b)^p to DOFs a and b.
void add_spring_power(std::vector<PolyTerm>& terms, int a, int b, int p, double c) {
  for (int j = 0; j <= p; ++j) {
    const double coeff = c * binomial(p, j) * ((j % 2) ? -1.0 : 1.0);
    PolyTerm t;
    t.coeff = coeff;
    if (p - j > 0) t.factors.push_back({a, p - j});
    if (j > 0) t.factors.push_back({b, j});
    t.out_dof = a;
    terms.push_back(t);
    t.coeff = -coeff;
    t.out_dof = b;
    terms.push_back(t);
  }
}

MechanicalModel assemble(const ChainConfig& c, double mid_ratio, double clamp_mass) {
  const int nc = c.masses;
  const int nj = static_cast<int>(c.joint_masses.size());
  const int n = nc + nj;
  const double kp = c.joint_stiffness > 0.0 ? c.joint_stiffness : 0.15 * c.spring;
  const double kc = c.clamp_stiffness_ratio * kp;

  MechanicalModel m;
  m.n = n;
  m.label = "chain";
  m.M = Mat::Zero(n, n);
  m.K = Mat::Zero(n, n);
  m.C = Mat::Zero(n, n);
  m.static_load = Vec::Zero(n);
  m.excitation = Vec::Zero(n);
  for (int i = 0; i < nc; ++i) {
    m.M(i, i) = c.mass;
    m.excitation[i] = 1.0;
  }
  auto add_spring = [&](int a, int b, double k) {
    m.K(a, a) += k;
    if (b >= 0) {
      m.K(b, b) += k;
      m.K(a, b) -= k;
      m.K(b, a) -= k;
    }
  };
  const int mid = (nc - 1) / 2;
  for (int i = 0; i + 1 < nc; ++i) {
    add_spring(i, i + 1, i == mid ? mid_ratio * c.spring : c.spring);
    if (c.quadratic != 0.0) add_spring_power(m.geom_force, i, i + 1, 2, c.quadratic);
    if (c.cubic != 0.0) add_spring_power(m.geom_force, i, i + 1, 3, c.cubic);
  }
  add_spring(0, -1, c.spring);
  add_spring(nc - 1, -1, c.spring);
  for (int e = 0; e < nj; ++e) {
    const int clamp = nc + e;
    m.M(clamp, clamp) = clamp_mass;
    add_spring(clamp, -1, kc);
    FrictionElement fe;
    fe.dof_normal = clamp;
    fe.dof_tangent_u = c.joint_masses[e];
    fe.k_p = kp;
    fe.mu = c.mu;
    fe.preload_gap = 0.0;
    m.friction.push_back(fe);
    m.static_load[clamp] = -c.preloads[e];
  }
  return m;
}

// Two slowest undamped chain frequencies of the linearization about the
// static state. Clamp DOFs decouple in K_eff and are left out.
std::pair<double, double> slow_frequencies(const MechanicalModel& m, int nc) {
  const EquilibriumState eq = static_equilibrium(m);
  const Linearization lin = linearize(m, eq);
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(lin.K_eff.topLeftCorner(nc, nc),
                                                    m.M.topLeftCorner(nc, nc),
                                                    Eigen::EigenvaluesOnly);
  const Vec w2 = ges.eigenvalues();
  return {std::sqrt(std::max(0.0, w2[0])), std::sqrt(std::max(0.0, w2[1]))};
}

}  // namespace

MechanicalModel build_benchmark_chain(const ChainConfig& c, BenchInfo* info) {
  require(c.masses >= 3, "build_benchmark_chain: need at least 3 chain masses");
  require(c.joint_masses.size() == c.preloads.size(),
          "build_benchmark_chain: one preload per joint required");
  for (int j : c.joint_masses) {
    require(j >= 0 && j < c.masses, "build_benchmark_chain: joint mass index out of range");
  }
  for (double p : c.preloads) require(p > 0.0, "build_benchmark_chain: preloads must be positive");
  require(c.mass > 0.0 && c.spring > 0.0, "build_benchmark_chain: mass and spring must be positive");

  auto ratio_at = [&](double s) {
    const auto [w1, w2] = slow_frequencies(assemble(c, s, 1.0), c.masses);
    return w2 / w1;
  };

  double s = c.mid_ratio;
  if (c.tune) {
    double lo = std::log(1e-3);
    double hi = std::log(1e3);
    double flo = ratio_at(std::exp(lo)) - c.target_ratio;
    double fhi = ratio_at(std::exp(hi)) - c.target_ratio;
    if (flo * fhi > 0.0) {
      const bool lo_better = std::abs(flo) < std::abs(fhi);
      const double best = lo_better ? flo : fhi;
      if (std::abs(best) > c.ratio_tolerance) {
        fail(ErrorKind::kInvalidArgument,
             fmt::format("build_benchmark_chain: frequency ratio {} is infeasible (reachable range "
                         "[{:.4f}, {:.4f}])", c.target_ratio, std::min(flo, fhi) + c.target_ratio,
                         std::max(flo, fhi) + c.target_ratio));
      }
      s = std::exp(lo_better ? lo : hi);
    } else {
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = ratio_at(std::exp(mid)) - c.target_ratio;
        if (fm * flo <= 0.0) {
          hi = mid;
          fhi = fm;
        } else {
          lo = mid;
          flo = fm;
        }
      }
      s = std::exp(0.5 * (lo + hi));
    }
  }

  MechanicalModel m = assemble(c, s, 1.0);
  const auto [w1, w2] = slow_frequencies(m, c.masses);
  const double ratio = w2 / w1;
  if (std::abs(ratio - c.target_ratio) > c.ratio_tolerance) {
    fail(ErrorKind::kInvalidArgument,
         fmt::format("build_benchmark_chain: achieved ratio {:.4f} outside tolerance", ratio));
  }
  double clamp_mass = 1.0;
  if (!m.friction.empty()) {
    const double kp = m.friction.front().k_p;
    const double kc = c.clamp_stiffness_ratio * kp;
    clamp_mass = (kc + kp) / std::pow(c.contact_frequency_factor * w2, 2);
    m = assemble(c, s, clamp_mass);
  }
  // Rayleigh damping placing ratio zeta on both slow modes.
  const double alpha = 2.0 * c.damping_ratio * w1 * w2 / (w1 + w2);
  const double beta = 2.0 * c.damping_ratio / (w1 + w2);
  m.C = alpha * m.M + beta * m.K;
  m.validate();
  if (info) {
    info->mid_ratio = s;
    info->omega1 = w1;
    info->omega2 = w2;
    info->clamp_mass = clamp_mass;
    info->rayleigh_alpha = alpha;
    info->rayleigh_beta = beta;
  }
  return m;
}

}  // namespace ssm::bench
