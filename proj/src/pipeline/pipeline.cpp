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

#include "pipeline/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <future>
#include <numbers>
#include <random>

#include <fmt/format.h>

namespace ssm::pipeline {

namespace {

std::vector<cplx> to_weights(const std::vector<double>& w) {
  std::vector<cplx> out;
  for (double v : w) out.emplace_back(v, 0.0);
  return out;
}

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

PipelineConfig PipelineConfig::from(const KeyValueConfig& c) {
  PipelineConfig p;
  p.chain = bench::ChainConfig::from(c);
  p.modes = c.get_ints("ssm.modes", p.modes);
  p.geometry_order = c.get_int("ssm.geometry_order", p.geometry_order);
  p.svd_tolerance = c.get_double("ssm.svd_tolerance", p.svd_tolerance);
  p.normal_form_order = c.get_int("ssm.normal_form_order", p.normal_form_order);
  p.transform_order = c.get_int("ssm.transform_order", p.transform_order);
  p.resonance_order = c.get_int("ssm.resonance_order", p.resonance_order);
  p.resonance_tol = c.get_double("ssm.resonance_tol", p.resonance_tol);
  p.duration = c.get_double("sim.duration", p.duration);
  p.output_dt = c.get_double("sim.output_dt", p.output_dt);
  p.rel_tol = c.get_double("sim.rel_tol", p.rel_tol);
  p.discard = c.get_double("train.discard", p.discard);
  p.train_amplitude_mode1 = c.get_double("train.mode1_amplitude", p.train_amplitude_mode1);
  p.train_amplitude_mode2 = c.get_double("train.mode2_amplitude", p.train_amplitude_mode2);
  p.train_amplitude_mixed = c.get_double("train.mixed_amplitude", p.train_amplitude_mixed);
  p.mixed_weights = c.get_doubles("train.mixed_weights", p.mixed_weights);
  p.validation_weights = c.get_doubles("validate.weights", p.validation_weights);
  p.validation_amplitude = c.get_double("validate.amplitude", p.validation_amplitude);
  p.perturbation = c.get_double("train.perturbation", p.perturbation);
  p.fit_stride = c.get_int("fit.stride", p.fit_stride);
  p.fit_ridge = c.get_double("fit.ridge", p.fit_ridge);
  const std::string method = c.get_string("fit.derivatives", "spline");
  if (method == "spline") {
    p.derivatives.method = normalform::DerivativeMethod::kSpline;
  } else if (method == "central") {
    p.derivatives.method = normalform::DerivativeMethod::kCentral;
  } else {
    fail(ErrorKind::kParse, "config: fit.derivatives must be 'spline' or 'central'");
  }
  p.derivatives.smoothing = c.get_double("fit.smoothing", p.derivatives.smoothing);
  p.threshold = c.get_double("validate.threshold", p.threshold);
  p.observation_dof = c.get_int("output.observation_dof", p.observation_dof);
  p.spectrogram_window = c.get_int("output.spectrogram_window", p.spectrogram_window);
  p.seed = static_cast<unsigned long long>(c.get_int("seed", static_cast<int>(p.seed)));
  return p;
}

BenchSetup setup_bench(const PipelineConfig& cfg) {
  BenchSetup b;
  b.model = bench::build_benchmark_chain(cfg.chain, &b.info);
  b.equilibrium = bench::static_equilibrium(b.model);
  b.linearization = bench::linearize(b.model, b.equilibrium);
  b.spectrum = spectral::eigen_sorted(b.linearization.A);
  b.subspace = spectral::select_subspace(b.spectrum, cfg.modes);
  return b;
}

Vec initial_state(const BenchSetup& bench, const InitialRecipe& recipe) {
  const auto& sub = bench.subspace;
  require(static_cast<int>(recipe.weights.size()) == sub.modes(), "initial_state: one weight per mode required");
  const Eigen::Index N = sub.V.rows();
  Vec x = Vec::Zero(N);
  for (int j = 0; j < sub.modes(); ++j) {
    // Re(c phi) = c_r Re(phi) - c_i Im(phi)
    x += recipe.weights[j].real() * sub.V.col(2 * j) - recipe.weights[j].imag() * sub.V.col(2 * j + 1);
  }
  const double peak = x.head(N / 2).cwiseAbs().maxCoeff();
  require(peak > 0.0, "initial_state: recipe has no displacement content");
  return x * (recipe.amplitude / peak);
}

std::vector<InitialRecipe> training_recipes(const PipelineConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  const int M = static_cast<int>(cfg.modes.size());
  auto jitter = [&]() { return std::polar(cfg.perturbation * uniform(rng), 2.0 * std::numbers::pi * uniform(rng)); };
  std::vector<InitialRecipe> out;
  for (int lead = 0; lead < std::min(M, 2); ++lead) {
    InitialRecipe r;
    r.label = fmt::format("mode{}", lead + 1);
    r.amplitude = lead == 0 ? cfg.train_amplitude_mode1 : cfg.train_amplitude_mode2;
    for (int j = 0; j < M; ++j) r.weights.push_back(j == lead ? cplx(1.0) : jitter());
    out.push_back(r);
  }
  InitialRecipe mixed;
  mixed.label = "mixed";
  mixed.amplitude = cfg.train_amplitude_mixed;
  mixed.weights = to_weights(cfg.mixed_weights);
  require(static_cast<int>(mixed.weights.size()) == M, "config: train.mixed_weights needs one weight per mode");
  for (int j = 1; j < M; ++j) mixed.weights[j] *= std::polar(1.0, 2.0 * std::numbers::pi * uniform(rng));
  out.push_back(mixed);
  return out;
}

InitialRecipe validation_recipe(const PipelineConfig& cfg) {
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  InitialRecipe r;
  r.label = "validation";
  r.amplitude = cfg.validation_amplitude;
  r.weights = to_weights(cfg.validation_weights);
  require(r.weights.size() == cfg.modes.size(), "config: validate.weights needs one weight per mode");
  for (std::size_t j = 1; j < r.weights.size(); ++j) {
    r.weights[j] *= std::polar(1.0, 2.0 * std::numbers::pi * uniform(rng));
  }
  return r;
}

Trajectory rom_prediction(const normalform::NormalFormModel& nf, const geometry::ManifoldParam& manifold,
                          const spectral::SpectralSubspace& subspace, const Trajectory& reference,
                          double rel_tol) {
  require(reference.samples() > 0, "rom_prediction: empty reference");
  const Vec y0 = subspace.pseudo_inverse * reference.snapshots.col(0);
  const CVec xi0 = normalform::xi_from_y(y0);
  const CVec z0 = normalform::inverse_transform(nf, xi0);
  const auto rom = normalform::simulate_rom(nf, z0, reference.times, rel_tol);
  Trajectory out;
  out.times = reference.times;
  out.origin = reference.origin;
  out.label = reference.label + "-rom";
  out.initial_condition = reference.initial_condition;
  out.snapshots.resize(reference.snapshots.rows(), reference.samples());
  CVec guess = xi0;
  for (int k = 0; k < reference.samples(); ++k) {
    const CVec xi = normalform::transform(nf, rom.z.col(k), &guess);
    guess = xi;
    out.snapshots.col(k) = geometry::reconstruct(manifold, normalform::y_from_xi(xi));
  }
  return out;
}

forcing::ForcingSpec base_forcing(const BenchSetup& bench, double a) {
  forcing::ForcingSpec spec;
  const Vec p = bench::base_excitation(1.0, bench.model);
  spec.unit_force = forcing::project_forcing(forcing::first_order_force(bench.model.M, p), bench.subspace);
  spec.a = a;
  return spec;
}

SteadyState full_model_steady_amplitude(const BenchSetup& bench, double a, double omega, const Vec& x0,
                                        int dof, double rel_tol, double settle, int max_periods) {
  require(omega > 0.0, "steady state: omega must be positive");
  require(dof >= 0 && dof < bench.model.n, "steady state: observation index out of range");
  const double T = 2.0 * std::numbers::pi / omega;
  constexpr int kPerPeriod = 64;
  constexpr int kChunk = 20;
  bench::SimulationOptions opts;
  opts.rel_tol = rel_tol;
  opts.output_dt = T / kPerPeriod;
  Vec x = x0;
  std::optional<bench::JointState> joints;
  double t = 0.0;
  SteadyState st;
  double prev = -1.0;
  // Beating transients can match one chunk to the next by chance, so the
  // change must stay small over several chunks in a row.
  constexpr int kSettledChunks = 3;
  int settled = 0;
  for (int done = 0; done < max_periods; done += kChunk) {
    const auto r = bench::simulate(bench.model, bench.equilibrium, x, bench::HarmonicForcing{a, omega}, t,
                                   t + kChunk * T, opts, joints);
    const int S = r.trajectory.samples();
    double sum = 0.0;
    for (int k = S - kPerPeriod; k < S; ++k) sum += r.trajectory.snapshots(dof, k) * r.trajectory.snapshots(dof, k);
    const double amp = std::sqrt(2.0 * sum / kPerPeriod);
    x = r.final_state;
    joints = r.final_joints;
    t += kChunk * T;
    st.amplitude = amp;
    st.periods = t / T;
    if (prev > 0.0) {
      st.last_change = std::abs(amp - prev) / amp;
      settled = st.last_change < settle ? settled + 1 : 0;
      if (settled >= kSettledChunks) {
        st.converged = true;
        break;
      }
    }
    prev = amp;
  }
  return st;
}

PipelineResult run_pipeline(const PipelineConfig& cfg, const std::string& out_dir) {
  require(cfg.modes.size() >= 1, "run_pipeline: no modes selected");
  require(cfg.duration > 0.0 && cfg.output_dt > 0.0, "run_pipeline: duration and output_dt must be positive");
  PipelineResult res;
  res.bench = setup_bench(cfg);
  const BenchSetup& b = res.bench;
  for (const auto& w : b.spectrum.warnings) res.warnings.push_back("spectrum: " + w);

  const auto omegas = b.subspace.frequencies();
  res.resonances = spectral::detect_resonances(omegas, cfg.resonance_order, cfg.resonance_tol);
  const auto tmpl = normalform::nf_structure(b.subspace.modes(), cfg.normal_form_order, res.resonances);

  // Decays run concurrently; each is a pure function of its inputs.
  std::vector<InitialRecipe> recipes = training_recipes(cfg);
  recipes.push_back(validation_recipe(cfg));
  bench::SimulationOptions sopts;
  sopts.rel_tol = cfg.rel_tol;
  sopts.output_dt = cfg.output_dt;
  std::vector<std::future<Trajectory>> jobs;
  for (const auto& r : recipes) {
    jobs.push_back(std::async(std::launch::async, [&b, &sopts, &cfg, r]() {
      const Vec x0 = initial_state(b, r);
      auto sim = bench::simulate(b.model, b.equilibrium, x0, std::nullopt, 0.0, cfg.duration, sopts);
      sim.trajectory.label = r.label;
      std::string ic = fmt::format("{} amplitude={:.6g} weights=", r.label, r.amplitude);
      for (const auto& w : r.weights) ic += fmt::format("({:.6g},{:.6g})", w.real(), w.imag());
      sim.trajectory.initial_condition = ic;
      return std::move(sim.trajectory);
    }));
  }
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    Trajectory t = jobs[i].get();
    if (i + 1 < jobs.size()) {
      res.training.push_back(std::move(t));
    } else {
      res.validation = std::move(t);
    }
  }
  // The initial transient off the manifold is dropped from every decay,
  // the held-out one included.
  auto crop = [&](Trajectory& d) {
    int skip = 0;
    while (skip < d.samples() && d.times[skip] < d.times.front() + cfg.discard) ++skip;
    d.times.erase(d.times.begin(), d.times.begin() + skip);
    d.snapshots = Mat(d.snapshots.rightCols(d.snapshots.cols() - skip));
  };
  for (auto& t : res.training) crop(t);
  crop(res.validation);
  const std::vector<Trajectory>& fit_data = res.training;

  geometry::GeometryOptions gopts;
  gopts.svd_tolerance = cfg.svd_tolerance;
  res.manifold = geometry::fit_geometry(fit_data, b.subspace, cfg.geometry_order, gopts);
  for (const auto& w : res.manifold.warnings) res.warnings.push_back(w);
  std::vector<geometry::ReducedTrajectory> reduced;
  for (const auto& t : fit_data) {
    auto r = geometry::project(b.subspace, t);
    normalform::estimate_derivatives(r, cfg.derivatives);
    reduced.push_back(std::move(r));
  }
  normalform::FitOptions fopts;
  fopts.transform_order = cfg.transform_order;
  fopts.stride = cfg.fit_stride;
  fopts.ridge = cfg.fit_ridge;
  fopts.expected_linear = b.subspace.eigenvalues;
  res.normal_form = normalform::fit_normal_form(reduced, tmpl, fopts, &res.fit_report);
  for (const auto& w : res.fit_report.warnings) res.warnings.push_back(w);

  for (std::size_t i = 0; i < fit_data.size(); ++i) {
    const Mat Xg = geometry::reconstruct(res.manifold, reduced[i].y);
    res.geometry_nmte.push_back(nmte(fit_data[i].snapshots, Xg).value);
    const Trajectory pred = rom_prediction(res.normal_form, res.manifold, b.subspace, fit_data[i]);
    res.training_nmte.push_back(nmte(fit_data[i], pred).value);
  }
  const Trajectory vpred = rom_prediction(res.normal_form, res.manifold, b.subspace, res.validation);
  res.validation_nmte = nmte(res.validation, vpred);
  res.passed = res.validation_nmte.value < cfg.threshold;

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    spectral::write_spectrum_table(b.spectrum, (dir / "spectrum.txt").string());
    geometry::write_manifold(res.manifold, (dir / "manifold.txt").string());
    normalform::write_rom_coefficients(res.normal_form, (dir / "rom.txt").string());
    for (const auto& t : res.training) write_trajectory(t, (dir / ("train_" + t.label + ".txt")).string());
    write_trajectory(res.validation, (dir / "validation.txt").string());
    write_trajectory(vpred, (dir / "validation_rom.txt").string());
    {
      std::vector<double> sig(res.validation.samples());
      for (int k = 0; k < res.validation.samples(); ++k) sig[k] = res.validation.snapshots(cfg.observation_dof, k);
      if (static_cast<int>(sig.size()) >= cfg.spectrogram_window) {
        write_spectrogram(spectrogram(sig, 1.0 / cfg.output_dt, cfg.spectrogram_window),
                          (dir / "validation_spectrogram.txt").string());
      }
    }
    std::FILE* f = std::fopen((dir / "report.txt").string().c_str(), "w");
    if (!f) fail(ErrorKind::kIo, "cannot write report in " + out_dir);
    fmt::print(f, "status {}\n", res.passed ? "pass" : "fail");
    fmt::print(f, "threshold_percent {:.6g}\n", cfg.threshold);
    fmt::print(f, "validation_nmte_percent {:.9g}\n", res.validation_nmte.value);
    for (std::size_t w = 0; w < res.validation_nmte.windows.size(); ++w) {
      fmt::print(f, "validation_nmte_window{} {:.9g}\n", w + 1, res.validation_nmte.windows[w]);
    }
    for (std::size_t i = 0; i < res.training.size(); ++i) {
      fmt::print(f, "training_nmte_{} {:.9g}\n", res.training[i].label, res.training_nmte[i]);
      fmt::print(f, "geometry_nmte_{} {:.9g}\n", res.training[i].label, res.geometry_nmte[i]);
    }
    fmt::print(f, "omega_ratio {:.9g}\n", b.info.omega2 / b.info.omega1);
    fmt::print(f, "fit_relative_residual {:.9g}\n", res.fit_report.relative_residual);
    fmt::print(f, "fit_iterations {}\n", res.fit_report.iterations);
    fmt::print(f, "derivatives {}\n", reduced.front().derivative_method);
    fmt::print(f, "seed {}\n", cfg.seed);
    for (const auto& w : res.warnings) fmt::print(f, "warning {}\n", w);
    std::fclose(f);
  }
  return res;
}

}  // namespace ssm::pipeline
