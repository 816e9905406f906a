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
#include <numbers>

#include "oracles.hpp"
#include "spectral/spectral.hpp"

using namespace ssm;
using namespace ssm::spectral;

TEST_SUITE("spectral") {

TEST_CASE("1-DOF eigenvalue matches the closed form") {
  const double zeta = 0.004, w0 = 2.0 * std::numbers::pi * 109.4;
  const Mat M = Mat::Identity(1, 1);
  const Mat K = Mat::Constant(1, 1, w0 * w0);
  const Mat C = Mat::Constant(1, 1, 2.0 * zeta * w0);
  const LinearSpectrum sp = eigen_sorted(M, C, K);
  REQUIRE(sp.modes() == 1);
  const cplx expected = oracle::one_dof_eigenvalue(zeta, w0);
  CHECK(std::abs(sp.lambda(0) - expected) <= 1e-12 * std::abs(expected));
  CHECK(sp.eigenvalues[1] == std::conj(sp.eigenvalues[0]));
  CHECK(sp.damping_ratio(0) == doctest::Approx(zeta).epsilon(1e-12));
}

TEST_CASE("undamped 2-DOF frequencies match the closed form") {
  const double k = 3.0e4, kc = 7.0e3, m = 1.5;
  Mat K(2, 2);
  K << k + kc, -kc, -kc, k + kc;
  const LinearSpectrum sp =
      eigen_sorted(m * Mat::Identity(2, 2), Mat::Zero(2, 2), K, ModeOrdering::kFrequency);
  REQUIRE(sp.modes() == 2);
  CHECK(std::abs(sp.frequency(0) - oracle::two_dof_w1(k, m)) <= 1e-10 * oracle::two_dof_w1(k, m));
  CHECK(std::abs(sp.frequency(1) - oracle::two_dof_w2(k, kc, m)) <=
        1e-10 * oracle::two_dof_w2(k, kc, m));
}

TEST_CASE("eigenpairs satisfy A phi = lambda phi and the ordering holds") {
  Mat K(3, 3), C(3, 3);
  K << 5, -2, 0, -2, 6, -3, 0, -3, 4;
  C = 0.01 * Mat::Identity(3, 3) + 0.002 * K;
  const Mat M = Vec::LinSpaced(3, 1.0, 2.0).asDiagonal();
  const Mat A = first_order_matrix(M, C, K);
  const LinearSpectrum sp = eigen_sorted(A);
  REQUIRE(sp.modes() == 3);
  for (int j = 0; j < sp.modes(); ++j) {
    const CVec r = A.cast<cplx>() * sp.phi(j) - sp.lambda(j) * sp.phi(j);
    CHECK(r.norm() < 1e-12 * std::abs(sp.lambda(j)));
    CHECK(sp.phi(j).norm() == doctest::Approx(1.0));
    CHECK(sp.frequency(j) > 0.0);
    CHECK(sp.eigenvalues[2 * j + 1] == std::conj(sp.eigenvalues[2 * j]));
    CHECK((sp.eigenvectors.col(2 * j + 1) - sp.phi(j).conjugate()).norm() == 0.0);
    if (j > 0) CHECK(sp.lambda(j - 1).real() >= sp.lambda(j).real());
  }
  const LinearSpectrum sf = eigen_sorted(A, ModeOrdering::kFrequency);
  for (int j = 1; j < sf.modes(); ++j) CHECK(sf.frequency(j - 1) <= sf.frequency(j));
}

TEST_CASE("overdamped roots are reported, not ordered") {
  const Mat M = Mat::Identity(1, 1);
  const LinearSpectrum sp = eigen_sorted(M, Mat::Constant(1, 1, 10.0), Mat::Constant(1, 1, 1.0));
  CHECK(sp.modes() == 0);
  CHECK(sp.overdamped.size() == 2);
  CHECK_FALSE(sp.warnings.empty());
}

TEST_CASE("select_subspace") {
  Mat K(2, 2);
  K << 2.0, -1.0, -1.0, 2.0;
  const Mat M = Mat::Identity(2, 2);
  const LinearSpectrum sp = eigen_sorted(M, 0.01 * K, K);
  const std::vector<int> one{0};
  const SpectralSubspace s1 = select_subspace(sp, one);
  CHECK(s1.dim() == 2);
  CHECK((s1.pseudo_inverse * s1.V - Mat::Identity(2, 2)).norm() < 1e-12);
  const std::vector<int> two{0, 1};
  const SpectralSubspace s2 = select_subspace(sp, two);
  CHECK(s2.dim() == 4);
  CHECK((s2.pseudo_inverse * s2.V - Mat::Identity(4, 4)).norm() < 1e-12);
  // Complement of span(V1) projects to zero.
  const Mat P = Mat::Identity(4, 4) - s1.V * s1.pseudo_inverse;
  const Vec x = P * Vec::LinSpaced(4, 1.0, 4.0);
  CHECK((s1.pseudo_inverse * x).norm() < 1e-12);
  const std::vector<int> bad{0, 0};
  CHECK_THROWS_AS(select_subspace(sp, bad), Error);
  const std::vector<int> out{5};
  CHECK_THROWS_AS(select_subspace(sp, out), Error);
}

TEST_CASE("detect_resonances") {
  const std::vector<double> exact{1.0, 2.0};
  const ResonanceSet r = detect_resonances(exact, 5, 0.01);
  const std::vector<int> k{2, 0};
  CHECK(r.contains(1, k));          // 2 w1 = w2
  const std::vector<int> k2{-1, 1};
  CHECK(r.contains(0, k2));         // w2 - w1 = w1
  CHECK_FALSE(r.nontrivial().empty());
  // Self-resonances generating |z|^2 z terms.
  CHECK(r.contains(0, std::vector<int>{1, 0}));

  const std::vector<double> incommensurate{1.0, std::sqrt(3.0)};
  const ResonanceSet ri = detect_resonances(incommensurate, 5, 0.02);
  CHECK(ri.nontrivial().empty());

  const std::vector<double> detuned{109.4, 196.6};
  const ResonanceSet rd = detect_resonances(detuned, 3, 0.15);
  CHECK(rd.contains(1, k));
  CHECK_THROWS_AS(detect_resonances(exact, 1, 0.1), Error);
}

}  // TEST_SUITE
