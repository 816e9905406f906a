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

#include <cmath>

#include <Eigen/Sparse>
#include <fmt/format.h>

#include "normalform/normalform.hpp"

namespace ssm::normalform {

namespace {

Vec solve_sparse(const std::vector<Eigen::Triplet<double>>& trip, Eigen::Index n, const Vec& rhs) {
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) fail(ErrorKind::kNumeric, "differentiate: singular spline system");
  return lu.solve(rhs);
}

// Slopes of the not-a-knot cubic interpolating spline.
Vec interpolating_spline_slopes(std::span<const double> x, const Vec& y) {
  const Eigen::Index n = y.size();
  Vec dx(n - 1), slope(n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    dx[i] = x[i + 1] - x[i];
    slope[i] = (y[i + 1] - y[i]) / dx[i];
  }
  std::vector<Eigen::Triplet<double>> t;
  Vec b(n);
  {
    const double d = x[2] - x[0];
    t.emplace_back(0, 0, dx[1]);
    t.emplace_back(0, 1, d);
    b[0] = ((dx[0] + 2.0 * d) * dx[1] * slope[0] + dx[0] * dx[0] * slope[1]) / d;
  }
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    t.emplace_back(i, i - 1, dx[i]);
    t.emplace_back(i, i, 2.0 * (dx[i - 1] + dx[i]));
    t.emplace_back(i, i + 1, dx[i - 1]);
    b[i] = 3.0 * (dx[i] * slope[i - 1] + dx[i - 1] * slope[i]);
  }
  {
    const double d = x[n - 1] - x[n - 3];
    t.emplace_back(n - 1, n - 1, dx[n - 3]);
    t.emplace_back(n - 1, n - 2, d);
    b[n - 1] = (dx[n - 2] * dx[n - 2] * slope[n - 3] + (2.0 * d + dx[n - 2]) * dx[n - 3] * slope[n - 2]) / d;
  }
  return solve_sparse(t, n, b);
}

// Natural smoothing spline minimizing sum (y - g)^2 + lambda int g''^2
// (Reinsch), differentiated at the knots.
Vec smoothing_spline_slopes(std::span<const double> x, const Vec& y, double lambda) {
  const Eigen::Index n = y.size();
  const Eigen::Index k = n - 2;
  Vec h(n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i) h[i] = x[i + 1] - x[i];
  Eigen::SparseMatrix<double> Q(n, k), R(k, k);
  std::vector<Eigen::Triplet<double>> tq, tr;
  for (Eigen::Index c = 0; c < k; ++c) {
    const Eigen::Index i = c + 1;
    tq.emplace_back(i - 1, c, 1.0 / h[i - 1]);
    tq.emplace_back(i, c, -1.0 / h[i - 1] - 1.0 / h[i]);
    tq.emplace_back(i + 1, c, 1.0 / h[i]);
    tr.emplace_back(c, c, (h[i - 1] + h[i]) / 3.0);
    if (c + 1 < k) {
      tr.emplace_back(c, c + 1, h[i] / 6.0);
      tr.emplace_back(c + 1, c, h[i] / 6.0);
    }
  }
  Q.setFromTriplets(tq.begin(), tq.end());
  R.setFromTriplets(tr.begin(), tr.end());
  Eigen::SparseMatrix<double> A = R + lambda * Eigen::SparseMatrix<double>(Q.transpose() * Q);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
  if (ldlt.info() != Eigen::Success) fail(ErrorKind::kNumeric, "differentiate: smoothing system failed");
  const Vec qty = Q.transpose() * y;
  const Vec gamma_in = ldlt.solve(qty);
  const Vec g = y - lambda * (Q * gamma_in);
  Vec gamma = Vec::Zero(n);
  gamma.segment(1, k) = gamma_in;
  Vec d(n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    d[i] = (g[i + 1] - g[i]) / h[i] - h[i] * (2.0 * gamma[i] + gamma[i + 1]) / 6.0;
  }
  d[n - 1] = (g[n - 1] - g[n - 2]) / h[n - 2] + h[n - 2] * (gamma[n - 2] + 2.0 * gamma[n - 1]) / 6.0;
  return d;
}

// Five-point stencils, one-sided near the ends; exact for quartics.
Vec central_differences(std::span<const double> x, const Vec& y) {
  const Eigen::Index n = y.size();
  const double h = (x[n - 1] - x[0]) / static_cast<double>(n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (std::abs((x[i + 1] - x[i]) - h) > 1e-6 * h) {
      fail(ErrorKind::kInvalidArgument, "differentiate: central differences need uniform spacing");
    }
  }
  Vec d(n);
  const double c = 1.0 / (12.0 * h);
  d[0] = c * (-25 * y[0] + 48 * y[1] - 36 * y[2] + 16 * y[3] - 3 * y[4]);
  d[1] = c * (-3 * y[0] - 10 * y[1] + 18 * y[2] - 6 * y[3] + y[4]);
  for (Eigen::Index i = 2; i + 2 < n; ++i) d[i] = c * (y[i - 2] - 8 * y[i - 1] + 8 * y[i + 1] - y[i + 2]);
  d[n - 2] = c * (3 * y[n - 1] + 10 * y[n - 2] - 18 * y[n - 3] + 6 * y[n - 4] - y[n - 5]);
  d[n - 1] = c * (25 * y[n - 1] - 48 * y[n - 2] + 36 * y[n - 3] - 16 * y[n - 4] + 3 * y[n - 5]);
  return d;
}

}  // namespace

Vec differentiate(std::span<const double> t, const Vec& y, const DerivativeOptions& opts) {
  const auto n = static_cast<Eigen::Index>(t.size());
  require(n == y.size(), "differentiate: time and value lengths differ");
  require(n >= 5, "differentiate: need at least 5 samples");
  for (Eigen::Index i = 0; i + 1 < n; ++i) require(t[i + 1] > t[i], "differentiate: times must increase");
  require(opts.smoothing >= 0.0, "differentiate: smoothing must be non-negative");
  if (opts.method == DerivativeMethod::kCentral) return central_differences(t, y);
  if (opts.smoothing == 0.0) return interpolating_spline_slopes(t, y);
  return smoothing_spline_slopes(t, y, opts.smoothing);
}

void estimate_derivatives(geometry::ReducedTrajectory& traj, const DerivativeOptions& opts) {
  traj.ydot.resize(traj.y.rows(), traj.y.cols());
  for (Eigen::Index r = 0; r < traj.y.rows(); ++r) {
    traj.ydot.row(r) = differentiate(traj.times, Vec(traj.y.row(r).transpose()), opts).transpose();
  }
  traj.derivative_method = opts.method == DerivativeMethod::kCentral
                               ? std::string("central-5pt")
                               : fmt::format("spline lambda={:g}", opts.smoothing);
}

}  // namespace ssm::normalform
