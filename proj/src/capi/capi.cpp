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

#include "ssmrom/ssmrom.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "forcing/forcing.hpp"
#include "normalform/normalform.hpp"
#include "pipeline/config.hpp"
#include "pipeline/metrics.hpp"
#include "pipeline/pipeline.hpp"

struct ssmrom_config {
  ssm::KeyValueConfig kv;
};

struct ssmrom_bench {
  ssm::pipeline::PipelineConfig cfg;
  ssm::pipeline::BenchSetup setup;
};

struct ssmrom_model {
  ssm::pipeline::PipelineConfig cfg;
  ssm::pipeline::PipelineResult result;
};

struct ssmrom_rom {
  ssm::normalform::NormalFormModel nf;
};

struct ssmrom_trajectory {
  ssm::Trajectory traj;
};

namespace {

thread_local std::string last_error;

ssmrom_status status_of(ssm::ErrorKind kind) {
  switch (kind) {
    case ssm::ErrorKind::kInvalidArgument: return SSMROM_INVALID_ARGUMENT;
    case ssm::ErrorKind::kParse: return SSMROM_PARSE_ERROR;
    case ssm::ErrorKind::kIo: return SSMROM_IO_ERROR;
    case ssm::ErrorKind::kSolver: return SSMROM_SOLVER_ERROR;
    case ssm::ErrorKind::kValidation: return SSMROM_VALIDATION_FAILED;
    case ssm::ErrorKind::kNumeric: return SSMROM_NUMERIC_ERROR;
  }
  return SSMROM_INTERNAL_ERROR;
}

// Runs f, translating exceptions into status codes and the thread-local
// message.
template <typename F>
ssmrom_status guarded(F&& f) {
  last_error.clear();
  try {
    f();
    return SSMROM_OK;
  } catch (const ssm::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return SSMROM_INTERNAL_ERROR;
  } catch (const std::exception& e) {
    last_error = e.what();
    return SSMROM_INTERNAL_ERROR;
  } catch (...) {
    last_error = "unknown error";
    return SSMROM_INTERNAL_ERROR;
  }
}

void need(const void* p, const char* what) {
  if (!p) ssm::fail(ssm::ErrorKind::kInvalidArgument, std::string(what) + " must not be NULL");
}

ssm::pipeline::PipelineConfig pipeline_config(const ssmrom_config* config) {
  return config ? ssm::pipeline::PipelineConfig::from(config->kv) : ssm::pipeline::PipelineConfig{};
}

ssm::forcing::FRCBranch model_frc(const ssmrom_model* model, double a, double omega_lo, double omega_hi,
                                  int dof) {
  const auto& r = model->result;
  ssm::require(dof >= 0 && dof < r.bench.model.n, "frc: observation DOF out of range");
  ssm::forcing::ContinuationOptions opts;
  opts.observation.manifold = &r.manifold;
  opts.observation.dof = dof;
  return ssm::forcing::continue_frc(r.normal_form, ssm::pipeline::base_forcing(r.bench, a), omega_lo,
                                    omega_hi, opts);
}

}  // namespace

extern "C" {

const char* ssmrom_version(void) { return "0.1.0"; }

const char* ssmrom_last_error(void) { return last_error.c_str(); }

const char* ssmrom_status_name(ssmrom_status status) {
  switch (status) {
    case SSMROM_OK: return "ok";
    case SSMROM_INVALID_ARGUMENT: return "invalid argument";
    case SSMROM_PARSE_ERROR: return "parse error";
    case SSMROM_IO_ERROR: return "i/o error";
    case SSMROM_SOLVER_ERROR: return "solver failure";
    case SSMROM_VALIDATION_FAILED: return "validation failed";
    case SSMROM_NUMERIC_ERROR: return "numeric error";
    case SSMROM_INTERNAL_ERROR: return "internal error";
  }
  return "unknown status";
}

ssmrom_status ssmrom_config_create(ssmrom_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new ssmrom_config{};
  });
}

ssmrom_status ssmrom_config_load(const char* path, ssmrom_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    auto kv = ssm::KeyValueConfig::load(path);
    *out = new ssmrom_config{std::move(kv)};
  });
}

ssmrom_status ssmrom_config_set(ssmrom_config* config, const char* key, const char* value) {
  return guarded([&] {
    need(config, "config");
    need(key, "key");
    need(value, "value");
    config->kv.set(key, value);
  });
}

ssmrom_status ssmrom_config_get(const ssmrom_config* config, const char* key, char* buf, size_t size,
                                int* found) {
  return guarded([&] {
    need(config, "config");
    need(key, "key");
    need(found, "found");
    *found = config->kv.has(key) ? 1 : 0;
    if (buf && size > 0) {
      const std::string v = *found ? config->kv.get_string(key, "") : "";
      const size_t n = std::min(size - 1, v.size());
      std::memcpy(buf, v.data(), n);
      buf[n] = '\0';
    }
  });
}

void ssmrom_config_destroy(ssmrom_config* config) { delete config; }

ssmrom_status ssmrom_bench_create(const ssmrom_config* config, ssmrom_bench** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    auto cfg = pipeline_config(config);
    auto setup = ssm::pipeline::setup_bench(cfg);
    *out = new ssmrom_bench{std::move(cfg), std::move(setup)};
  });
}

void ssmrom_bench_destroy(ssmrom_bench* bench) { delete bench; }

ssmrom_status ssmrom_bench_get_info(const ssmrom_bench* bench, ssmrom_bench_info* out) {
  return guarded([&] {
    need(bench, "bench");
    need(out, "out");
    const auto& s = bench->setup;
    out->dofs = s.model.n;
    out->joints = static_cast<int>(s.model.friction.size());
    out->modes = s.spectrum.modes();
    out->omega1 = s.info.omega1;
    out->omega2 = s.info.omega2;
    out->mid_ratio = s.info.mid_ratio;
  });
}

ssmrom_status ssmrom_bench_eigenvalues(const ssmrom_bench* bench, double* re, double* im, int capacity,
                                       int* count) {
  return guarded([&] {
    need(bench, "bench");
    need(count, "count");
    const auto& sp = bench->setup.spectrum;
    *count = sp.modes();
    for (int j = 0; j < std::min(capacity, sp.modes()); ++j) {
      if (re) re[j] = sp.lambda(j).real();
      if (im) im[j] = sp.lambda(j).imag();
    }
  });
}

ssmrom_status ssmrom_bench_write_spectrum(const ssmrom_bench* bench, const char* path) {
  return guarded([&] {
    need(bench, "bench");
    need(path, "path");
    ssm::spectral::write_spectrum_table(bench->setup.spectrum, path);
  });
}

ssmrom_status ssmrom_bench_simulate(const ssmrom_bench* bench, const ssmrom_config* config,
                                    const char* recipe, const char* path, ssmrom_energy_audit* audit) {
  return guarded([&] {
    need(bench, "bench");
    need(recipe, "recipe");
    const auto cfg = config ? pipeline_config(config) : bench->cfg;
    std::vector<ssm::pipeline::InitialRecipe> all = ssm::pipeline::training_recipes(cfg);
    all.push_back(ssm::pipeline::validation_recipe(cfg));
    const ssm::pipeline::InitialRecipe* chosen = nullptr;
    for (const auto& r : all) {
      if (r.label == recipe) chosen = &r;
    }
    if (!chosen) ssm::fail(ssm::ErrorKind::kInvalidArgument, std::string("unknown recipe '") + recipe + "'");
    ssm::bench::SimulationOptions opts;
    opts.rel_tol = cfg.rel_tol;
    opts.output_dt = cfg.output_dt;
    opts.energy_audit = audit != nullptr;
    const ssm::Vec x0 = ssm::pipeline::initial_state(bench->setup, *chosen);
    auto sim = ssm::bench::simulate(bench->setup.model, bench->setup.equilibrium, x0, std::nullopt, 0.0,
                                    cfg.duration, opts);
    sim.trajectory.label = chosen->label;
    if (path) ssm::write_trajectory(sim.trajectory, path);
    if (audit) {
      audit->e_start = sim.audit.e_start;
      audit->e_end = sim.audit.e_end;
      audit->damping_work = sim.audit.damping_work;
      audit->friction_work = sim.audit.friction_work;
      audit->forcing_work = sim.audit.forcing_work;
      audit->residual = sim.audit.residual();
    }
  });
}

ssmrom_status ssmrom_bench_steady_amplitude(const ssmrom_bench* bench, double a, double omega, int dof,
                                            double* amplitude) {
  return guarded([&] {
    need(bench, "bench");
    need(amplitude, "amplitude");
    const auto st = ssm::pipeline::full_model_steady_amplitude(
        bench->setup, a, omega, ssm::Vec::Zero(2 * bench->setup.model.n), dof);
    if (!st.converged) {
      ssm::fail(ssm::ErrorKind::kSolver, "steady state did not settle within the period budget");
    }
    *amplitude = st.amplitude;
  });
}

ssmrom_status ssmrom_pipeline_run(const ssmrom_config* config, const char* out_dir, ssmrom_model** out,
                                  ssmrom_summary* summary) {
  return guarded([&] {
    if (out) *out = nullptr;
    auto cfg = pipeline_config(config);
    auto result = ssm::pipeline::run_pipeline(cfg, out_dir ? out_dir : "");
    if (summary) {
      summary->validation_nmte = result.validation_nmte.value;
      summary->threshold = cfg.threshold;
      summary->passed = result.passed ? 1 : 0;
      summary->fit_residual = result.fit_report.relative_residual;
      summary->omega_ratio = result.bench.info.omega2 / result.bench.info.omega1;
    }
    if (out) *out = new ssmrom_model{std::move(cfg), std::move(result)};
  });
}

void ssmrom_model_destroy(ssmrom_model* model) { delete model; }

ssmrom_status ssmrom_model_rom(const ssmrom_model* model, ssmrom_rom** out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    *out = new ssmrom_rom{model->result.normal_form};
  });
}

ssmrom_status ssmrom_model_frc(const ssmrom_model* model, double a, double omega_lo, double omega_hi,
                               int dof, const char* path, ssmrom_frc_summary* summary) {
  return guarded([&] {
    need(model, "model");
    const auto br = model_frc(model, a, omega_lo, omega_hi, dof);
    if (path) ssm::forcing::write_frc_table(br, model->result.bench.info.omega1, path);
    if (summary) {
      summary->samples = static_cast<int>(br.samples.size());
      summary->folds = static_cast<int>(br.folds.size());
      summary->truncated = br.truncated ? 1 : 0;
      summary->peak_omega = br.peak ? br.peak->omega : 0.0;
      summary->peak_amplitude = br.peak ? br.peak->amplitude : 0.0;
    }
  });
}

ssmrom_status ssmrom_model_frc_amplitude(const ssmrom_model* model, double a, double omega, int dof,
                                         double* amplitude) {
  return guarded([&] {
    need(model, "model");
    need(amplitude, "amplitude");
    const double w1 = model->result.bench.info.omega1;
    ssm::require(omega >= 0.9 * w1 && omega <= 1.1 * w1, "frc: omega outside [0.9, 1.1] x omega1");
    const auto br = model_frc(model, a, 0.9 * w1, 1.1 * w1, dof);
    const auto v = ssm::forcing::amplitude_at(br, omega);
    if (!v) ssm::fail(ssm::ErrorKind::kSolver, "frc: no stable ROM response at this frequency");
    *amplitude = *v;
  });
}

ssmrom_status ssmrom_rom_load(const char* path, ssmrom_rom** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    auto nf = ssm::normalform::load_rom_coefficients(path);
    *out = new ssmrom_rom{std::move(nf)};
  });
}

ssmrom_status ssmrom_rom_save(const ssmrom_rom* rom, const char* path) {
  return guarded([&] {
    need(rom, "rom");
    need(path, "path");
    ssm::normalform::write_rom_coefficients(rom->nf, path);
  });
}

void ssmrom_rom_destroy(ssmrom_rom* rom) { delete rom; }

int ssmrom_rom_modes(const ssmrom_rom* rom) { return rom ? rom->nf.modes() : 0; }

ssmrom_status ssmrom_rom_polar_rhs(const ssmrom_rom* rom, const double* rho, const double* theta,
                                   double* rho_dot, double* theta_dot) {
  return guarded([&] {
    need(rom, "rom");
    need(rho, "rho");
    need(theta, "theta");
    const int M = rom->nf.modes();
    const auto p = ssm::normalform::polar_rhs(rom->nf, Eigen::Map<const ssm::Vec>(rho, M),
                                              Eigen::Map<const ssm::Vec>(theta, M));
    for (int j = 0; j < M; ++j) {
      if (rho_dot) rho_dot[j] = p.rho_dot[j];
      if (theta_dot) theta_dot[j] = p.theta_dot[j];
    }
  });
}

ssmrom_status ssmrom_rom_backbone(const ssmrom_rom* rom, int mode, double rho_max, int points,
                                  const char* backbone_path, const char* damping_path) {
  return guarded([&] {
    need(rom, "rom");
    ssm::require(mode >= 0 && mode < rom->nf.modes(), "backbone: mode out of range");
    ssm::require(rho_max > 0.0 && points >= 1, "backbone: need rho_max > 0 and points >= 1");
    std::vector<double> rho(points);
    for (int k = 0; k < points; ++k) rho[k] = rho_max * (k + 1) / points;
    ssm::forcing::BackboneOptions opts;
    opts.mode = mode;
    const auto curve = ssm::forcing::backbone(rom->nf, rho, opts);
    if (backbone_path) ssm::forcing::write_backbone_table(curve, backbone_path);
    if (damping_path) {
      ssm::forcing::write_damping_table(ssm::forcing::modal_damping_curve(rom->nf, curve, mode),
                                        damping_path);
    }
  });
}

ssmrom_status ssmrom_trajectory_load(const char* path, ssmrom_trajectory** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    auto t = ssm::read_trajectory(path);
    *out = new ssmrom_trajectory{std::move(t)};
  });
}

void ssmrom_trajectory_destroy(ssmrom_trajectory* traj) { delete traj; }

ssmrom_status ssmrom_trajectory_size(const ssmrom_trajectory* traj, int* samples, int* components) {
  return guarded([&] {
    need(traj, "traj");
    if (samples) *samples = traj->traj.samples();
    if (components) *components = traj->traj.state_dim();
  });
}

ssmrom_status ssmrom_trajectory_times(const ssmrom_trajectory* traj, double* out) {
  return guarded([&] {
    need(traj, "traj");
    need(out, "out");
    std::copy(traj->traj.times.begin(), traj->traj.times.end(), out);
  });
}

ssmrom_status ssmrom_trajectory_component(const ssmrom_trajectory* traj, int component, double* out) {
  return guarded([&] {
    need(traj, "traj");
    need(out, "out");
    ssm::require(component >= 0 && component < traj->traj.state_dim(), "trajectory: component out of range");
    for (int k = 0; k < traj->traj.samples(); ++k) out[k] = traj->traj.snapshots(component, k);
  });
}

ssmrom_status ssmrom_spectrogram(const double* signal, size_t n, double sample_rate, int window, int hop,
                                 const char* path, int* bins, int* frames) {
  return guarded([&] {
    need(signal, "signal");
    const auto s = ssm::pipeline::spectrogram(std::span<const double>(signal, n), sample_rate, window, hop);
    if (path) ssm::pipeline::write_spectrogram(s, path);
    if (bins) *bins = static_cast<int>(s.magnitude.rows());
    if (frames) *frames = static_cast<int>(s.magnitude.cols());
  });
}

ssmrom_status ssmrom_bolt_preload(const ssmrom_bolt_spec* spec, double* force) {
  return guarded([&] {
    need(spec, "spec");
    need(force, "force");
    ssm::pipeline::BoltSpec b;
    b.torque = spec->torque;
    b.pitch = spec->pitch;
    b.pitch_diameter = spec->pitch_diameter;
    b.head_diameter = spec->head_diameter;
    b.mu_thread = spec->mu_thread;
    b.mu_head = spec->mu_head;
    *force = ssm::pipeline::bolt_preload(b);
  });
}

}  // extern "C"
