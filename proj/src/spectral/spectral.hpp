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

#pragma once

#include <span>
#include <string>
#include <vector>

#include "common.hpp"

namespace ssm::spectral {

enum class ModeOrdering {
  kRealPart,   // Re(lambda_1) >= Re(lambda_2) >= ...  (slowest decay first)
  kFrequency,  // ascending damped frequency
};

// Underdamped eigenpairs of the first-order system matrix. Each mode j is
// stored as the pair (lambda_j, conj(lambda_j)) at positions 2j, 2j+1 of
// `eigenvalues` and of the columns of `eigenvectors`; Im(lambda_j) > 0.
struct LinearSpectrum {
  std::vector<cplx> eigenvalues;
  CMat eigenvectors;              // 2n x 2*modes()
  std::vector<double> overdamped; // real eigenvalues, reported not ordered
  std::vector<std::string> warnings;

  int modes() const { return static_cast<int>(eigenvalues.size() / 2); }
  cplx lambda(int mode) const { return eigenvalues[2 * mode]; }
  CVec phi(int mode) const { return eigenvectors.col(2 * mode); }
  double frequency(int mode) const { return eigenvalues[2 * mode].imag(); }
  double damping_ratio(int mode) const {
    return -eigenvalues[2 * mode].real() / std::abs(eigenvalues[2 * mode]);
  }
};

// First-order matrix [[0, I], [-M^-1 K, -M^-1 C]].
Mat first_order_matrix(const Mat& M, const Mat& C, const Mat& K);

// Eigenvectors are scaled to unit 2-norm with their largest-magnitude
// displacement entry real and positive.
LinearSpectrum eigen_sorted(const Mat& M, const Mat& C, const Mat& K_eff,
                            ModeOrdering ordering = ModeOrdering::kRealPart);
LinearSpectrum eigen_sorted(const Mat& A, ModeOrdering ordering = ModeOrdering::kRealPart);

// Real tangent basis V = [Re phi_j, Im phi_j, ...] and its pseudo-inverse.
struct SpectralSubspace {
  std::vector<int> mode_indices;
  std::vector<cplx> eigenvalues;  // lambda_j of the selected modes (Im > 0)
  Mat V;                          // 2n x m
  Mat pseudo_inverse;             // m x 2n

  int dim() const { return static_cast<int>(V.cols()); }
  int modes() const { return static_cast<int>(mode_indices.size()); }
  std::vector<double> frequencies() const;
};

SpectralSubspace select_subspace(const LinearSpectrum& spectrum, std::span<const int> mode_indices,
                                 double rank_tol = 1e-12);

struct ResonanceRelation {
  int target = -1;       // -1: sum k_i omega_i ~ 0, otherwise ~ omega_target
  std::vector<int> k;
  double detuning = 0.0; // relative mismatch
};

struct ResonanceSet {
  std::vector<double> omegas;
  int max_order = 0;
  double rel_tol = 0.0;
  std::vector<ResonanceRelation> relations;

  bool contains(int target, std::span<const int> k) const;
  // Relations other than the identities k = e_target.
  std::vector<ResonanceRelation> nontrivial() const;
};

// Enumerates integer vectors k with 1 <= |k|_1 <= max_order. A relation to
// target j is kept when |k.omega - omega_j| <= rel_tol * max(omega_j,
// max_i |k_i| omega_i); internal (target -1) relations use the same bound
// with omega_target = 0 and are stored once per sign pair.
ResonanceSet detect_resonances(std::span<const double> omegas, int max_order = 5,
                               double rel_tol = 0.1);

// index, Re lambda, Im lambda, frequency Hz, damping ratio
void write_spectrum_table(const LinearSpectrum& spectrum, const std::string& path);

}  // namespace ssm::spectral
