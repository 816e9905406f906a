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

// Closed-form reference values used by the tests. Nothing here calls into
// the library under test.

#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace oracle {

// Underdamped 1-DOF eigenvalue -zeta w0 + i w0 sqrt(1 - zeta^2).
inline std::complex<double> one_dof_eigenvalue(double zeta, double w0) {
  return {-zeta * w0, w0 * std::sqrt(1.0 - zeta * zeta)};
}

// Free response x(t) of x'' + 2 zeta w0 x' + w0^2 x = 0, x(0) = x0, x'(0) = 0.
inline double one_dof_decay(double zeta, double w0, double x0, double t) {
  const double wd = w0 * std::sqrt(1.0 - zeta * zeta);
  return x0 * std::exp(-zeta * w0 * t) * (std::cos(wd * t) + zeta * w0 / wd * std::sin(wd * t));
}

// Undamped symmetric 2-DOF chain ground-k-m-kc-m-k-ground: w1 = sqrt(k/m),
// w2 = sqrt((k + 2 kc)/m).
inline double two_dof_w1(double k, double m) { return std::sqrt(k / m); }
inline double two_dof_w2(double k, double kc, double m) { return std::sqrt((k + 2.0 * kc) / m); }

// Jenkins element under u = A sin(w t) with constant normal force: the
// steady loop is a parallelogram of height 2 mu f_n and width
// 2 (A - mu f_n / k_p), so the dissipated work per cycle is
// 4 mu f_n (A - mu f_n / k_p), i.e. mu f_n times four slip amplitudes.
inline double jenkins_loop_work(double mu, double fn, double kp, double amplitude) {
  const double slip = amplitude - mu * fn / kp;
  return slip > 0.0 ? 4.0 * mu * fn * slip : 0.0;
}

// Linear mode z' = lambda z + (f/2) e^{i W t}: steady |z| = |f| / (2 |lambda - i W|),
// largest |f| / (2 |Re lambda|) at W = Im lambda.
inline double linear_frf(std::complex<double> lambda, double f, double w) {
  return std::abs(f) / (2.0 * std::abs(lambda - std::complex<double>(0.0, w)));
}

// Stuart-Landau with frequency w0 + g rho^2: backbone frequency.
inline double duffing_backbone(double w0, double g, double rho) { return w0 + g * rho * rho; }

// Bolt preload F = T / (0.159 P + 0.578 d2 mu_T + 0.5 D_f mu_H).
inline double bolt_preload(double T, double P, double d2, double Df, double muT, double muH) {
  return T / (0.159 * P + 0.578 * d2 * muT + 0.5 * Df * muH);
}

inline long long binomial(int n, int k) {
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace oracle
