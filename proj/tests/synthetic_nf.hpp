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

// Synthetic normal-form data with known coefficients. Derivatives of the
// xi coordinates come from central differences of the forward transform
// along the exact z flow, so they do not reuse the fit's Jacobian code.

#pragma once

#include <random>
#include <vector>

#include "geometry/geometry.hpp"
#include "normalform/normalform.hpp"
#include "spectral/spectral.hpp"

namespace synth {

using ssm::cplx;
using ssm::CVec;
namespace nf = ssm::normalform;

// Two modes at 1:2 with random order-3 template coefficients and, when
// with_transform is set, random non-resonant inverse-transform terms up to
// order 3.
inline nf::NormalFormModel truth_model(bool with_transform, unsigned seed = 7) {
  const std::vector<double> om{1.0, 2.0};
  const auto res = ssm::spectral::detect_resonances(om, 3, 0.1);
  nf::NormalFormModel m;
  m.tmpl = nf::nf_structure(2, 3, res);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::vector<cplx> lam{{-0.02, 1.0}, {-0.03, 2.0}};
  for (int j = 0; j < 2; ++j) {
    m.N.emplace_back();
    for (std::size_t k = 0; k < m.tmpl.terms[j].size(); ++k) {
      m.N[j].push_back(k == 0 ? lam[j] : cplx(0.05 * u(rng), 0.05 * u(rng)));
    }
  }
  m.h_terms.resize(2);
  m.H.resize(2);
  if (with_transform) {
    const ssm::geometry::MonomialBasis basis(4, 2, 3);
    for (int j = 0; j < 2; ++j) {
      for (const auto& e : basis.exponents) {
        nf::Monomial mono;
        mono.a.assign(e.begin(), e.begin() + 2);
        mono.b.assign(e.begin() + 2, e.end());
        const std::vector<int> k{mono.a[0] - mono.b[0], mono.a[1] - mono.b[1]};
        if (m.tmpl.resonant(j, k)) continue;
        m.h_terms[j].push_back(mono);
        m.H[j].push_back(cplx(0.1 * u(rng), 0.1 * u(rng)));
      }
    }
  }
  return m;
}

inline std::vector<CVec> decay_initial_conditions() {
  std::vector<CVec> z0(3, CVec::Zero(2));
  z0[0] << cplx(0.4, 0.0), cplx(0.02, 0.01);
  z0[1] << cplx(0.02, 0.0), cplx(0.0, 0.35);
  z0[2] << cplx(0.25, 0.1), cplx(-0.2, 0.1);
  return z0;
}

// Reduced trajectories (y, ydot) of decays of `truth`.
inline std::vector<ssm::geometry::ReducedTrajectory> decays(const nf::NormalFormModel& truth,
                                                            int samples = 3001, double dt = 0.02) {
  std::vector<double> times;
  for (int k = 0; k < samples; ++k) times.push_back(dt * k);
  std::vector<ssm::geometry::ReducedTrajectory> out;
  for (const CVec& z0 : decay_initial_conditions()) {
    const auto rt = nf::simulate_rom(truth, z0, times, 1e-12);
    ssm::geometry::ReducedTrajectory r;
    r.times = times;
    r.y.resize(4, samples);
    r.ydot.resize(4, samples);
    CVec guess;
    for (int k = 0; k < samples; ++k) {
      const CVec z = rt.z.col(k);
      const CVec xi = nf::transform(truth, z, k ? &guess : nullptr);
      guess = xi;
      const CVec zd = nf::nf_rhs(truth, z);
      const double eps = 1e-6;
      const CVec zp = z + eps * zd;
      const CVec zm = z - eps * zd;
      const CVec xid = (nf::transform(truth, zp, &xi) - nf::transform(truth, zm, &xi)) / (2.0 * eps);
      r.y.col(k) = nf::y_from_xi(xi);
      r.ydot.col(k) = nf::y_from_xi(xid);
    }
    r.derivative_method = "exact";
    out.push_back(std::move(r));
  }
  return out;
}

inline double worst_relative_error(const nf::NormalFormModel& fit, const nf::NormalFormModel& truth) {
  double worst = 0.0;
  for (int j = 0; j < truth.modes(); ++j) {
    for (std::size_t k = 0; k < truth.N[j].size(); ++k) {
      worst = std::max(worst, std::abs(fit.N[j][k] - truth.N[j][k]) / std::abs(truth.N[j][k]));
    }
    if (truth.H[j].empty()) continue;
    if (fit.H.size() <= static_cast<std::size_t>(j) || fit.H[j].size() != truth.H[j].size()) return 1e300;
    for (std::size_t k = 0; k < truth.H[j].size(); ++k) {
      if (!(fit.h_terms[j][k] == truth.h_terms[j][k])) return 1e300;
      worst = std::max(worst, std::abs(fit.H[j][k] - truth.H[j][k]) / std::abs(truth.H[j][k]));
    }
  }
  return worst;
}

}  // namespace synth
