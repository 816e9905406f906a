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

#include "forcing/forcing.hpp"
#include "oracles.hpp"

using namespace ssm;
using namespace ssm::forcing;
using normalform::Monomial;
using normalform::NormalFormModel;

namespace {

const std::string kA1 = std::string(SSMROM_DATA_DIR) + "/reference_rom_4d.txt";

// z' = lambda z + i g |z|^2 z
NormalFormModel duffing(cplx lambda, double g) {
  const std::vector<cplx> ls{lambda};
  NormalFormModel m = normalform::linear_model(ls);
  m.tmpl.order = 3;
  m.tmpl.terms[0].push_back(Monomial{{2}, {1}});
  m.N[0].push_back(cplx(0.0, g));
  return m;
}

ForcingSpec unit_spec(double f) {
  ForcingSpec s;
  s.unit_force = CVec::Constant(1, cplx(f, 0.0));
  s.a = 1.0;
  return s;
}

double duffing_residual(cplx lambda, double g, double f, double W, double rho) {
  const double det = lambda.imag() + g * rho * rho - W;
  return rho * rho * (lambda.real() * lambda.real() + det * det) - 0.25 * f * f;
}

}  // namespace

TEST_SUITE("forcing") {

TEST_CASE("linear FRC matches the closed-form response") {
  const cplx lambda(-0.05, 10.0);
  const std::vector<cplx> ls{lambda};
  const NormalFormModel lin = normalform::linear_model(ls);
  const double f = 0.02;
  const FRCBranch br = continue_frc(lin, unit_spec(f), 9.0, 11.0);
  REQUIRE(br.samples.size() > 10);
  CHECK_FALSE(br.aborted);
  double worst = 0.0;
  for (const auto& s : br.samples) {
    const double exact = oracle::linear_frf(lambda, f, s.omega);
    worst = std::max(worst, std::abs(s.rho[0] - exact) / exact);
    CHECK(s.stability == Stability::kStable);
  }
  CHECK(worst < 1e-8);
  REQUIRE(br.peak);
  CHECK(br.peak->rho[0] == doctest::Approx(f / (2.0 * 0.05)).epsilon(1e-8));
  CHECK(br.peak->omega == doctest::Approx(10.0).epsilon(1e-8));
  CHECK(br.folds.empty());
}

TEST_CASE("Duffing FRC peak lies on the backbone") {
  const cplx lambda(-0.05, 10.0);
  const double g = 10.0, f = 0.02;
  const NormalFormModel m = duffing(lambda, g);
  const FRCBranch br = continue_frc(m, unit_spec(f), 9.5, 11.5);
  REQUIRE(br.peak);
  const double rho = br.peak->rho[0];
  CHECK(rho == doctest::Approx(f / 0.1).epsilon(1e-6));
  CHECK(br.peak->omega == doctest::Approx(oracle::duffing_backbone(10.0, g, rho)).epsilon(1e-6));
  for (const auto& s : br.samples) {
    CHECK(std::abs(duffing_residual(lambda, g, f, s.omega, s.rho[0])) < 1e-10 * f * f);
  }
  const std::vector<double> rhos{0.0, 0.05, 0.1};
  const auto bb = backbone(m, rhos);
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    CHECK(bb[i].omega == doctest::Approx(oracle::duffing_backbone(10.0, g, rhos[i])).epsilon(1e-12));
    CHECK(bb[i].omega_normalized == doctest::Approx(bb[i].omega / 10.0).epsilon(1e-12));
  }
}

TEST_CASE("overhanging Duffing FRC has a fold pair with an unstable middle") {
  const cplx lambda(-0.05, 10.0);
  const NormalFormModel m = duffing(lambda, 10.0);
  const FRCBranch br = continue_frc(m, unit_spec(0.04), 9.5, 13.0);
  REQUIRE(br.folds.size() == 2);
  const int a = br.folds[0].after_sample;
  const int b = br.folds[1].after_sample;
  int unstable_between = 0, unstable_outside = 0;
  for (int i = 0; i < static_cast<int>(br.samples.size()); ++i) {
    const bool unstable = br.samples[i].stability == Stability::kUnstable;
    if (i > a + 1 && i < b) unstable_between += unstable ? 1 : 0;
    if (i < a - 1 || i > b + 2) unstable_outside += unstable ? 1 : 0;
  }
  CHECK(unstable_between > 0);
  CHECK(unstable_outside == 0);
  // Analytic fold condition: d Omega / d rho = 0 on the response curve.
  for (const auto& fp : br.folds) {
    const double w = fp.omega;
    const double rho = fp.amplitude;
    const double h = 1e-6;
    const double r0 = duffing_residual(lambda, 10.0, 0.04, w, rho);
    const double dr = (duffing_residual(lambda, 10.0, 0.04, w, rho + h) -
                       duffing_residual(lambda, 10.0, 0.04, w, rho - h)) / (2.0 * h);
    CHECK(std::abs(r0) < 1e-9);
    CHECK(std::abs(dr) < 1e-5 * rho);
  }
}

TEST_CASE("stability flags") {
  Mat J(2, 2);
  J << -1.0, 2.0, -2.0, -1.0;
  CHECK(stability_flags(J) == Stability::kStable);
  J(0, 0) = 3.0;
  CHECK(stability_flags(J) == Stability::kUnstable);
  J << 0.0, 0.0, 0.0, -1.0;
  CHECK(stability_flags(J) == Stability::kMarginal);
}

TEST_CASE("small forcing approaches the linear FRF") {
  const cplx lambda(-0.05, 10.0);
  const NormalFormModel m = duffing(lambda, 40.0);
  double prev = 1e300;
  for (double f : {4e-3, 2e-3, 1e-3}) {
    const FRCBranch br = continue_frc(m, unit_spec(f), 9.8, 10.2);
    double worst = 0.0;
    for (const auto& s : br.samples) {
      const double lin = oracle::linear_frf(lambda, f, s.omega);
      worst = std::max(worst, std::abs(s.rho[0] - lin) / lin);
    }
    CHECK(worst < 0.6 * prev);
    prev = worst;
  }
}

TEST_CASE("project_forcing") {
  spectral::SpectralSubspace sub;
  Mat V(4, 2);
  V << 1.0, 0.0, 0.5, 0.2, 0.0, 1.0, 0.1, 0.5;
  sub.V = V;
  sub.pseudo_inverse = V.completeOrthogonalDecomposition().pseudoInverse();
  sub.mode_indices = {0};
  sub.eigenvalues = {cplx(-0.1, 2.0)};
  const Vec perp = (Mat::Identity(4, 4) - V * sub.pseudo_inverse) * Vec::LinSpaced(4, 1.0, 2.0);
  CHECK(project_forcing(perp, sub).norm() < 1e-14);
  const Vec p = V.col(1);
  const CVec f1 = project_forcing(p, sub);
  const CVec f2 = project_forcing(2.0 * p, sub);
  CHECK((f2 - 2.0 * f1).norm() < 1e-14);
  // y = (0, 1) maps to xi = (y_a - i y_b) / 2.
  CHECK(std::abs(f1[0] - cplx(0.0, -0.5)) < 1e-14);

  const Mat M = Eigen::Vector2d(2.0, 3.0).asDiagonal();
  Vec b(2);
  b << 1.0, 0.0;
  const Vec x = first_order_force(M, M * b);
  Vec expected(4);
  expected << 0.0, 0.0, 1.0, 0.0;
  CHECK((x - expected).norm() < 1e-15);
}

TEST_CASE("A1 backbone and damping curve") {
  const NormalFormModel a1 = normalform::load_rom_coefficients(kA1);
  const std::vector<double> rhos{1e-6, 0.02, 0.05, 0.1};
  const auto bb = backbone(a1, rhos);
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    const double r2 = rhos[i] * rhos[i];
    const double w = 692.9433 - 904.692 * r2 + 4296.951 * r2 * r2 + 1542.461 * r2 * r2 * r2;
    CHECK(bb[i].omega == doctest::Approx(w).epsilon(1e-12));
  }
  const auto dc = modal_damping_curve(a1, bb);
  CHECK(100.0 * dc.front().zeta == doctest::Approx(0.506).epsilon(0.002));

  const std::vector<cplx> ls{cplx(-0.2, 20.0)};
  const NormalFormModel lin = normalform::linear_model(ls);
  const auto lb = backbone(lin, rhos);
  const auto ld = modal_damping_curve(lin, lb);
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    CHECK(lb[i].omega == 20.0);
    CHECK(ld[i].zeta == doctest::Approx(ld[0].zeta).epsilon(1e-14));
  }
}

TEST_CASE("amplitude_at interpolates stable samples") {
  FRCBranch br;
  for (int i = 0; i < 3; ++i) {
    FRCSample s;
    s.omega = 1.0 + i;
    s.amplitude = 10.0 * (i + 1);
    br.samples.push_back(s);
  }
  CHECK(*amplitude_at(br, 1.5) == doctest::Approx(15.0));
  CHECK_FALSE(amplitude_at(br, 5.0).has_value());
  br.samples[1].stability = Stability::kUnstable;
  CHECK_FALSE(amplitude_at(br, 1.5).has_value());
}

}  // TEST_SUITE
