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

// End-to-end reduction of the jointed bench: simulate decays, identify the
// manifold and its normal form, validate on a held-out decay.

#pragma once

#include <string>
#include <vector>

#include "bench/chain.hpp"
#include "bench/integrator.hpp"
#include "forcing/forcing.hpp"
#include "geometry/geometry.hpp"
#include "normalform/normalform.hpp"
#include "pipeline/config.hpp"
#include "pipeline/metrics.hpp"
#include "spectral/spectral.hpp"

namespace ssm::pipeline {

// Initial condition Re(sum_j c_j phi_j), scaled so that the largest
// displacement magnitude equals `amplitude`.
struct InitialRecipe {
  std::string label;
  std::vector<cplx> weights;  // per selected mode
  double amplitude = 0.0;     // m
};

struct PipelineConfig {
  bench::ChainConfig chain = bench::ChainConfig::defaults();
  std::vector<int> modes{0, 1};
  int geometry_order = 7;
  double svd_tolerance = 1e-3;  // geometry regression cutoff
  int normal_form_order = 3;
  int transform_order = 3;
  int resonance_order = 5;
  double resonance_tol = 0.1;
  double duration = 3.0;        // s
  double output_dt = 1e-3;      // s
  double rel_tol = 1e-7;
  double discard = 0.3;         // s dropped from the start of each decay
  double train_amplitude_mode1 = 3e-3;
  double train_amplitude_mode2 = 1.5e-3;
  double train_amplitude_mixed = 2.5e-3;
  std::vector<double> mixed_weights{1.0, 0.6};
  std::vector<double> validation_weights{1.0, 0.5};
  double validation_amplitude = 2.2e-3;
  double perturbation = 0.05;   // random admixture of the other modes
  int fit_stride = 2;
  double fit_ridge = 1e-6;
  normalform::DerivativeOptions derivatives;
  double threshold = 10.0;      // percent NMTE
  int observation_dof = 0;
  int spectrogram_window = 256;
  unsigned long long seed = 1;

  static PipelineConfig from(const KeyValueConfig& cfg);
};

struct BenchSetup {
  bench::MechanicalModel model;
  bench::BenchInfo info;
  bench::EquilibriumState equilibrium;
  bench::Linearization linearization;
  spectral::LinearSpectrum spectrum;
  spectral::SpectralSubspace subspace;
};

BenchSetup setup_bench(const PipelineConfig& cfg);

Vec initial_state(const BenchSetup& bench, const InitialRecipe& recipe);

// Training (mode 1, mode 2, mixed) and held-out recipes; random phases and
// the admixture of other modes are drawn from `seed`.
std::vector<InitialRecipe> training_recipes(const PipelineConfig& cfg);
InitialRecipe validation_recipe(const PipelineConfig& cfg);

// Full-space trajectory of the ROM started from the projection of x~(0).
Trajectory rom_prediction(const normalform::NormalFormModel& nf, const geometry::ManifoldParam& manifold,
                          const spectral::SpectralSubspace& subspace, const Trajectory& reference,
                          double rel_tol = 1e-10);

struct PipelineResult {
  BenchSetup bench;
  spectral::ResonanceSet resonances;
  std::vector<Trajectory> training;
  Trajectory validation;
  geometry::ManifoldParam manifold;
  normalform::NormalFormModel normal_form;
  normalform::FitReport fit_report;
  std::vector<double> training_nmte;
  std::vector<double> geometry_nmte;  // reconstruct(project(x)) on training data
  NMTEReport validation_nmte;
  bool passed = false;
  std::vector<std::string> warnings;
};

// Writes artifacts to out_dir when non-empty. Throws only on hard errors;
// a validation NMTE above threshold is reported through `passed`.
PipelineResult run_pipeline(const PipelineConfig& cfg, const std::string& out_dir = "");

// Steady response of the full model under base excitation, by integrating
// until the sqrt(2) x RMS amplitude of `dof` over one period changes by less
// than `settle` across three successive 20-period chunks.
struct SteadyState {
  double amplitude = 0.0;
  double periods = 0.0;
  double last_change = 0.0;
  bool converged = false;
};

SteadyState full_model_steady_amplitude(const BenchSetup& bench, double a, double omega, const Vec& x0,
                                        int dof, double rel_tol = 1e-7, double settle = 2e-3,
                                        int max_periods = 3000);

forcing::ForcingSpec base_forcing(const BenchSetup& bench, double a);

}  // namespace ssm::pipeline
