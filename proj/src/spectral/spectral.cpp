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

#include "spectral/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

namespace ssm::spectral {

Mat first_order_matrix(const Mat& M, const Mat& C, const Mat& K) {
  const Eigen::Index n = M.rows();
  Eigen::LLT<Mat> llt(M);
  if (llt.info() != Eigen::Success) fail(ErrorKind::kInvalidArgument, "eigen: M must be SPD");
  Mat A = Mat::Zero(2 * n, 2 * n);
  A.topRightCorner(n, n).setIdentity();
  A.bottomLeftCorner(n, n) = -llt.solve(K);
  A.bottomRightCorner(n, n) = -llt.solve(C);
  return A;
}

LinearSpectrum eigen_sorted(const Mat& M, const Mat& C, const Mat& K_eff, ModeOrdering ordering) {
  return eigen_sorted(first_order_matrix(M, C, K_eff), ordering);
}

namespace {

void normalize(CVec& v, Eigen::Index n) {
  Eigen::Index imax = 0;
  v.head(n).cwiseAbs().maxCoeff(&imax);
  const cplx ref = v[imax];
  v *= std::conj(ref) / std::abs(ref);
  v /= v.norm();
  v[imax] = cplx(v[imax].real(), 0.0);
}

// Two steps of shifted inverse iteration with a Rayleigh-quotient update.
void polish(const Mat& A, cplx& lambda, CVec& v) {
  const Eigen::Index N = A.rows();
  const CMat Ac = A.cast<cplx>();
  for (int it = 0; it < 2; ++it) {
    const cplx shift = lambda * (1.0 + 1e-13);
    Eigen::PartialPivLU<CMat> lu(Ac - shift * CMat::Identity(N, N));
    CVec w = lu.solve(v);
    if (!w.allFinite() || w.norm() == 0.0) return;
    w /= w.norm();
    lambda = w.dot(Ac * w);  // w^H A w
    v = w;
  }
}

}  // namespace

LinearSpectrum eigen_sorted(const Mat& A, ModeOrdering ordering) {
  const Eigen::Index N = A.rows();
  require(N % 2 == 0 && A.cols() == N, "eigen: system matrix must be 2n x 2n");
  const Eigen::Index n = N / 2;
  Eigen::EigenSolver<Mat> es(A, true);
  if (es.info() != Eigen::Success) fail(ErrorKind::kNumeric, "eigen: eigenvalue iteration failed");
  const CVec evals = es.eigenvalues();
  const CMat evecs = es.eigenvectors();
  const double scale = std::max(1.0, evals.cwiseAbs().maxCoeff());

  LinearSpectrum sp;
  struct Mode {
    cplx lambda;
    CVec phi;
  };
  std::vector<Mode> modes;
  for (Eigen::Index i = 0; i < N; ++i) {
    const cplx l = evals[i];
    if (std::abs(l.imag()) <= 1e-12 * scale) {
      sp.overdamped.push_back(l.real());
      continue;
    }
    if (l.imag() < 0.0) continue;
    Mode m{l, evecs.col(i)};
    polish(A, m.lambda, m.phi);
    normalize(m.phi, n);
    modes.push_back(std::move(m));
  }
  std::sort(sp.overdamped.begin(), sp.overdamped.end(), std::greater<>());
  if (!sp.overdamped.empty()) {
    sp.warnings.push_back(fmt::format("{} overdamped (real) eigenvalues excluded from ordering",
                                      sp.overdamped.size()));
  }
  for (const auto& mo : modes) {
    if (mo.lambda.real() >= 0.0) {
      sp.warnings.push_back(fmt::format("eigenvalue {}+{}i has non-negative real part",
                                        mo.lambda.real(), mo.lambda.imag()));
    }
  }
  std::stable_sort(modes.begin(), modes.end(), [&](const Mode& a, const Mode& b) {
    if (ordering == ModeOrdering::kFrequency) return a.lambda.imag() < b.lambda.imag();
    if (a.lambda.real() != b.lambda.real()) return a.lambda.real() > b.lambda.real();
    return a.lambda.imag() < b.lambda.imag();
  });
  for (std::size_t i = 0; i + 1 < modes.size(); ++i) {
    for (std::size_t j = i + 1; j < modes.size(); ++j) {
      if (std::abs(modes[i].lambda - modes[j].lambda) > 1e-8 * scale) continue;
      const double overlap = std::abs(modes[i].phi.dot(modes[j].phi));
      if (overlap > 1.0 - 1e-6) {
        sp.warnings.push_back(fmt::format("modes {} and {} appear defective (repeated eigenvalue "
                                          "with parallel eigenvectors)", i, j));
      }
    }
  }
  sp.eigenvectors.resize(N, 2 * static_cast<Eigen::Index>(modes.size()));
  for (std::size_t j = 0; j < modes.size(); ++j) {
    sp.eigenvalues.push_back(modes[j].lambda);
    sp.eigenvalues.push_back(std::conj(modes[j].lambda));
    sp.eigenvectors.col(2 * j) = modes[j].phi;
    sp.eigenvectors.col(2 * j + 1) = modes[j].phi.conjugate();
  }
  return sp;
}

std::vector<double> SpectralSubspace::frequencies() const {
  std::vector<double> w;
  for (const auto& l : eigenvalues) w.push_back(l.imag());
  return w;
}

SpectralSubspace select_subspace(const LinearSpectrum& spectrum, std::span<const int> mode_indices,
                                 double rank_tol) {
  require(!mode_indices.empty(), "select_subspace: no modes requested");
  SpectralSubspace sub;
  const Eigen::Index N = spectrum.eigenvectors.rows();
  sub.V.resize(N, 2 * static_cast<Eigen::Index>(mode_indices.size()));
  for (std::size_t k = 0; k < mode_indices.size(); ++k) {
    const int j = mode_indices[k];
    require(j >= 0 && j < spectrum.modes(),
            fmt::format("select_subspace: mode {} is not an underdamped mode", j));
    for (std::size_t l = 0; l < k; ++l) {
      require(mode_indices[l] != j, "select_subspace: modes must be distinct");
    }
    sub.mode_indices.push_back(j);
    sub.eigenvalues.push_back(spectrum.lambda(j));
    const CVec phi = spectrum.phi(j);
    sub.V.col(2 * k) = phi.real();
    sub.V.col(2 * k + 1) = phi.imag();
  }
  Eigen::JacobiSVD<Mat> svd(sub.V, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec s = svd.singularValues();
  if (s.minCoeff() <= rank_tol * s.maxCoeff()) {
    fail(ErrorKind::kNumeric, "select_subspace: tangent basis is rank deficient");
  }
  sub.pseudo_inverse =
      svd.matrixV() * s.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
  return sub;
}

bool ResonanceSet::contains(int target, std::span<const int> k) const {
  for (const auto& r : relations) {
    if (r.target == target && std::equal(r.k.begin(), r.k.end(), k.begin(), k.end())) return true;
  }
  return false;
}

std::vector<ResonanceRelation> ResonanceSet::nontrivial() const {
  std::vector<ResonanceRelation> out;
  for (const auto& r : relations) {
    bool identity = r.target >= 0;
    for (std::size_t i = 0; i < r.k.size() && identity; ++i) {
      identity = r.k[i] == (static_cast<int>(i) == r.target ? 1 : 0);
    }
    if (!identity) out.push_back(r);
  }
  return out;
}

ResonanceSet detect_resonances(std::span<const double> omegas, int max_order, double rel_tol) {
  require(max_order >= 2, "detect_resonances: max_order must be >= 2");
  require(rel_tol > 0.0 && rel_tol <= 0.25, "detect_resonances: rel_tol must lie in (0, 0.25]");
  require(!omegas.empty(), "detect_resonances: no frequencies");
  ResonanceSet set;
  set.omegas.assign(omegas.begin(), omegas.end());
  set.max_order = max_order;
  set.rel_tol = rel_tol;
  const int M = static_cast<int>(omegas.size());

  std::vector<int> k(M, -max_order);
  auto advance = [&]() {
    for (int i = 0; i < M; ++i) {
      if (++k[i] <= max_order) return true;
      k[i] = -max_order;
    }
    return false;
  };
  do {
    int order = 0;
    double sum = 0.0;
    double kmax = 0.0;
    for (int i = 0; i < M; ++i) {
      order += std::abs(k[i]);
      sum += k[i] * omegas[i];
      kmax = std::max(kmax, std::abs(k[i]) * omegas[i]);
    }
    if (order == 0 || order > max_order) continue;
    for (int t = 0; t < M; ++t) {
      const double det = std::abs(sum - omegas[t]) / std::max(omegas[t], kmax);
      if (det <= rel_tol) set.relations.push_back({t, k, det});
    }
    // Internal relations, one representative per sign pair.
    const auto first = std::find_if(k.begin(), k.end(), [](int v) { return v != 0; });
    if (order >= 2 && *first > 0) {
      const double det = std::abs(sum) / kmax;
      if (det <= rel_tol) set.relations.push_back({-1, k, det});
    }
  } while (advance());
  return set;
}

void write_spectrum_table(const LinearSpectrum& spectrum, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) fail(ErrorKind::kIo, "cannot write " + path);
  fmt::print(f, "# index re_lambda im_lambda frequency_hz damping_ratio\n");
  for (int j = 0; j < spectrum.modes(); ++j) {
    const cplx l = spectrum.lambda(j);
    fmt::print(f, "{} {:.12e} {:.12e} {:.12e} {:.12e}\n", j + 1, l.real(), l.imag(),
               l.imag() / (2.0 * std::numbers::pi), spectrum.damping_ratio(j));
  }
  for (std::size_t i = 0; i < spectrum.overdamped.size(); ++i) {
    fmt::print(f, "# overdamped {:.12e}\n", spectrum.overdamped[i]);
  }
  std::fclose(f);
}

}  // namespace ssm::spectral
