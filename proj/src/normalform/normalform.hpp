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

// Extended normal form on the manifold. Each mode j carries a complex
// coordinate z_j; the conjugate equations are implied. Reduced coordinates
// y = (y_1a, y_1b, y_2a, ...) map onto xi_j = (y_ja - i y_jb) / 2, the
// diagonalizing coordinates of the linear part; the inverse transform is
// z = xi + h(xi, conj xi) with h holding only non-resonant monomials.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "common.hpp"
#include "geometry/geometry.hpp"
#include "spectral/spectral.hpp"

namespace ssm::normalform {

// z^a conj(z)^b
struct Monomial {
  std::vector<int> a;
  std::vector<int> b;
  int order() const;
  bool operator==(const Monomial&) const = default;
};

struct NormalFormTemplate {
  int modes = 0;
  int order = 0;
  std::vector<std::vector<Monomial>> terms;  // per equation, linear term first
  // Admitted phase vectors a - b per equation; the inverse transform uses
  // only monomials whose phase is not listed.
  std::vector<std::vector<std::vector<int>>> phases;
  int size() const;
  bool resonant(int eq, const std::vector<int>& phase) const;
};

// Admits z^a conj(z)^b in equation j when a - b = e_j or (j, a - b) is a
// relation of `resonances`. Orders 1..f.
NormalFormTemplate nf_structure(int modes, int f, const spectral::ResonanceSet& resonances);

struct NormalFormModel {
  NormalFormTemplate tmpl;
  std::vector<std::vector<cplx>> N;            // aligned with tmpl.terms
  std::vector<std::vector<Monomial>> h_terms;  // inverse-transform monomials in xi
  std::vector<std::vector<cplx>> H;
  Vec amplitude_max;                           // training max |z_j|; empty if unknown
  Vec xi_scale;                                // residual weights used by the fit
  std::string provenance;

  int modes() const { return tmpl.modes; }
  cplx linear(int j) const;
};

NormalFormModel linear_model(std::span<const cplx> eigenvalues);

// z_dot for the z_j equations.
CVec nf_rhs(const NormalFormModel& model, const CVec& z);
// Real Jacobian of (Re z_dot, Im z_dot) with respect to (Re z, Im z),
// ordered [Re z_1..Re z_M, Im z_1..Im z_M].
Mat nf_jacobian(const NormalFormModel& model, const CVec& z);

// g_j = rho_dot_j / rho_j + i theta_dot_j evaluated term by term in polar
// form. Requires rho_j > 0 wherever a rho_j^-1 term is present.
CVec polar_rates(const NormalFormModel& model, const Vec& rho, const Vec& theta);

struct PolarRhs {
  Vec rho_dot;
  Vec theta_dot;
};
// At rho_j = 0 the amplitude rate comes from the cartesian form and the
// phase rate keeps only the terms that stay finite.
PolarRhs polar_rhs(const NormalFormModel& model, const Vec& rho, const Vec& theta);

CVec to_cartesian(const Vec& rho, const Vec& theta);
void to_polar(const CVec& z, Vec& rho, Vec& theta);

// Linear change of basis between reduced coordinates and xi.
CVec xi_from_y(const Vec& y);
Vec y_from_xi(const CVec& xi);

// z = t^-1(xi)
CVec inverse_transform(const NormalFormModel& model, const CVec& xi);
// xi = t(z), Newton inversion of t^-1.
CVec transform(const NormalFormModel& model, const CVec& z, const CVec* guess = nullptr);

enum class DerivativeMethod { kSpline, kCentral };

struct DerivativeOptions {
  DerivativeMethod method = DerivativeMethod::kSpline;
  double smoothing = 0.0;  // spline only; 0 interpolates (not-a-knot)
};

// Fills traj.ydot and traj.derivative_method.
void estimate_derivatives(geometry::ReducedTrajectory& traj, const DerivativeOptions& opts = {});
// Single channel, exposed for testing.
Vec differentiate(std::span<const double> t, const Vec& y, const DerivativeOptions& opts = {});

struct FitOptions {
  int transform_order = -1;        // -1: same as the template order
  int als_sweeps = 3;
  int max_iterations = 60;
  double tolerance = 1e-13;        // relative objective decrease
  double ridge = 1e-12;            // relative Tikhonov weight on the nonlinear coefficients
  int stride = 1;                  // use every stride-th sample
  double residual_warning = 0.05;  // relative residual triggering the band report
  std::vector<cplx> expected_linear;  // subspace eigenvalues for the 2% check
};

struct FitReport {
  double objective = 0.0;
  double relative_residual = 0.0;
  int iterations = 0;
  std::vector<double> band_upper;     // amplitude band edges (|xi| max over modes)
  std::vector<double> band_residual;  // relative residual per band
  std::vector<std::string> warnings;
};

NormalFormModel fit_normal_form(std::span<const geometry::ReducedTrajectory> data,
                                const NormalFormTemplate& tmpl, const FitOptions& opts = {},
                                FitReport* report = nullptr);

// Objective of the fit on the given data (sum of squared residuals).
double fit_objective(const NormalFormModel& model,
                     std::span<const geometry::ReducedTrajectory> data);

struct RomTrajectory {
  std::vector<double> times;
  CMat z;  // modes x N
};

RomTrajectory simulate_rom(const NormalFormModel& model, const CVec& z0,
                           std::span<const double> times, double rel_tol = 1e-10);

struct DampingFrequency {
  Vec zeta;
  Vec omega;
};
// Terms with rho_i^-1 at rho_i = 0 are left out, so a mode held at zero
// amplitude reports its regular (backbone) rates.
DampingFrequency instantaneous_damping_frequency(const NormalFormModel& model, const Vec& rho,
                                                 const Vec& theta);

// Header "m=<2*modes> f=<order> convention=polar-extended", then one record
// per term: equation index (1-based), rho exponents, phase integers, Re, Im.
// Fitted models append "transform" records (equation, a, b, Re, Im) and an
// "envelope" line.
NormalFormModel load_rom_coefficients(const std::string& path);
void write_rom_coefficients(const NormalFormModel& model, const std::string& path);

}  // namespace ssm::normalform
