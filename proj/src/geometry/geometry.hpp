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

// Polynomial manifold parameterization x~ = V y + W_h y^{2:p} over reduced
// coordinates y = V^+ x~.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "bench/trajectory.hpp"
#include "common.hpp"
#include "spectral/spectral.hpp"

namespace ssm::geometry {

using Exponent = std::vector<int>;

// All monomials of total degree l..r in m variables, graded (ascending
// degree) and, within a degree, lexicographically descending in the
// exponent tuple: for m = 2, degree 2 gives y1^2, y1 y2, y2^2.
struct MonomialBasis {
  int m = 0;
  int lo = 0;
  int hi = 0;
  std::vector<Exponent> exponents;
  std::vector<int> counts;  // d_i for i = lo..hi

  MonomialBasis() = default;
  MonomialBasis(int m, int lo, int hi);
  int size() const { return static_cast<int>(exponents.size()); }
  Vec evaluate(const Vec& y) const;
  // Columns are samples: returns size() x N.
  Mat evaluate(const Mat& Y) const;
};

// d_i = C(m + i - 1, i)
long long monomial_count(int m, int degree);

Vec monomials(const Vec& y, int lo, int hi);

struct ReducedTrajectory {
  std::vector<double> times;
  Mat y;     // m x N
  Mat ydot;  // m x N, empty until estimated
  std::string derivative_method;
  int samples() const { return static_cast<int>(times.size()); }
};

ReducedTrajectory project(const spectral::SpectralSubspace& subspace, const Trajectory& traj);

struct GeometryOptions {
  bool constrain_tangent = true;     // order-1 block fixed to V
  bool project_complement = true;    // enforce V^+ W_h = 0 (constrained mode)
  double svd_tolerance = 1e-3;       // relative singular-value cutoff
  double condition_warning = 1e12;
  bool scale_data = true;            // normalize y by training max
};

struct ManifoldParam {
  int n = 0;  // physical DOFs; state dimension 2n
  int m = 0;
  int p = 1;
  Mat V;            // 2n x m
  Mat W;            // 2n x size(basis); orders 2..p (constrained) or 1..p
  MonomialBasis basis;
  Vec y_max;        // training amplitude per reduced coordinate
  double residual = 0.0;        // relative training residual ||X - v(Y)|| / ||X||
  double condition = 0.0;
  int rank = 0;
  std::vector<std::string> warnings;

  // Full coefficient matrix over y^{1:p}.
  Mat full_coefficients() const;
};

ManifoldParam fit_geometry(std::span<const Trajectory> trajectories,
                           const spectral::SpectralSubspace& subspace, int p,
                           const GeometryOptions& opts = {});

Vec reconstruct(const ManifoldParam& param, const Vec& y);
Mat reconstruct(const ManifoldParam& param, const Mat& Y);
// True when |y_i| exceeds 1.1x the training max for some i.
bool outside_training_hull(const ManifoldParam& param, const Vec& y);

// Header "n=<n> m=<m> p=<p> ordering=grlex", then the 2n x m basis V, a
// line "y_max ...", and one row of W per state component.
void write_manifold(const ManifoldParam& param, const std::string& path);
ManifoldParam read_manifold(const std::string& path);

}  // namespace ssm::geometry
