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

// Command-line front end. Every subcommand works through the C API.
//
//   ssmrom [--config FILE] [--out DIR] [--seed N] [--tol X] <command> [options]
//
// Exit codes: 0 success, 1 usage / input / i/o error, 2 validation NMTE
// above threshold, 3 solver failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ssmrom/ssmrom.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

struct Failure {
  ssmrom_status status;
};

int exit_code(ssmrom_status s) {
  switch (s) {
    case SSMROM_OK: return kExitOk;
    case SSMROM_VALIDATION_FAILED: return kExitValidation;
    case SSMROM_SOLVER_ERROR:
    case SSMROM_NUMERIC_ERROR: return kExitSolver;
    default: return kExitError;
  }
}

void check(ssmrom_status s) {
  if (s == SSMROM_OK) return;
  fmt::print(stderr, "ssmrom: {}: {}\n", ssmrom_status_name(s), ssmrom_last_error());
  throw Failure{s};
}

// Owning wrappers so early exits release handles.
template <typename T, void (*Destroy)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Destroy(p); }
};
using Config = Handle<ssmrom_config, ssmrom_config_destroy>;
using Bench = Handle<ssmrom_bench, ssmrom_bench_destroy>;
using Model = Handle<ssmrom_model, ssmrom_model_destroy>;
using Rom = Handle<ssmrom_rom, ssmrom_rom_destroy>;
using Traj = Handle<ssmrom_trajectory, ssmrom_trajectory_destroy>;

struct Globals {
  std::string config;
  std::string out = "ssmrom_out";
  long long seed = -1;
  double tol = 0.0;
};

void load_config(const Globals& g, Config& cfg) {
  if (g.config.empty()) {
    check(ssmrom_config_create(&cfg.p));
  } else {
    check(ssmrom_config_load(g.config.c_str(), &cfg.p));
  }
  if (g.seed >= 0) check(ssmrom_config_set(cfg.p, "seed", std::to_string(g.seed).c_str()));
  if (g.tol > 0.0) check(ssmrom_config_set(cfg.p, "sim.rel_tol", fmt::format("{}", g.tol).c_str()));
}

std::string out_path(const Globals& g, const std::string& name) {
  std::filesystem::create_directories(g.out);
  return (std::filesystem::path(g.out) / name).string();
}

double config_double(const Config& cfg, const char* key, double fallback) {
  char buf[256];
  int found = 0;
  check(ssmrom_config_get(cfg.p, key, buf, sizeof buf, &found));
  if (!found) return fallback;
  char* end = nullptr;
  const double v = std::strtod(buf, &end);
  if (end == buf) {
    fmt::print(stderr, "ssmrom: config key {} is not a number: '{}'\n", key, buf);
    throw Failure{SSMROM_PARSE_ERROR};
  }
  return v;
}

void print_summary(const ssmrom_summary& s) {
  fmt::print("validation_nmte_percent {:.6f}\n", s.validation_nmte);
  fmt::print("threshold_percent {:.6g}\n", s.threshold);
  fmt::print("fit_relative_residual {:.6g}\n", s.fit_residual);
  fmt::print("omega_ratio {:.6f}\n", s.omega_ratio);
  fmt::print("status {}\n", s.passed ? "pass" : "fail");
}

int cmd_simulate(const Globals& g, const std::vector<std::string>& recipes) {
  Config cfg;
  load_config(g, cfg);
  Bench bench;
  check(ssmrom_bench_create(cfg.p, &bench.p));
  fmt::print("# recipe file energy_residual dissipated relative_residual\n");
  for (const auto& r : recipes) {
    ssmrom_energy_audit audit{};
    const std::string path = out_path(g, r + ".txt");
    check(ssmrom_bench_simulate(bench.p, cfg.p, r.c_str(), path.c_str(), &audit));
    const double dissipated = audit.damping_work + audit.friction_work;
    fmt::print("{} {} {:.6e} {:.6e} {:.6e}\n", r, path, audit.residual, dissipated,
               dissipated > 0.0 ? audit.residual / dissipated : 0.0);
  }
  return kExitOk;
}

int cmd_eigen(const Globals& g) {
  Config cfg;
  load_config(g, cfg);
  Bench bench;
  check(ssmrom_bench_create(cfg.p, &bench.p));
  ssmrom_bench_info info{};
  check(ssmrom_bench_get_info(bench.p, &info));
  const std::string path = out_path(g, "spectrum.txt");
  check(ssmrom_bench_write_spectrum(bench.p, path.c_str()));
  int count = 0;
  check(ssmrom_bench_eigenvalues(bench.p, nullptr, nullptr, 0, &count));
  std::vector<double> re(count), im(count);
  check(ssmrom_bench_eigenvalues(bench.p, re.data(), im.data(), count, &count));
  fmt::print("# dofs {} joints {} omega2/omega1 {:.6f}\n", info.dofs, info.joints, info.omega2 / info.omega1);
  fmt::print("# index re_lambda im_lambda\n");
  for (int j = 0; j < count; ++j) fmt::print("{} {:.9e} {:.9e}\n", j + 1, re[j], im[j]);
  return kExitOk;
}

int cmd_fit(const Globals& g, bool enforce) {
  Config cfg;
  load_config(g, cfg);
  ssmrom_summary s{};
  check(ssmrom_pipeline_run(cfg.p, out_path(g, "").c_str(), nullptr, &s));
  print_summary(s);
  return (enforce && !s.passed) ? kExitValidation : kExitOk;
}

int cmd_frc(const Globals& g, std::vector<double> amplitudes, double lo, double hi, int dof) {
  Config cfg;
  load_config(g, cfg);
  if (amplitudes.empty()) amplitudes = {config_double(cfg, "frc.amplitude", 0.2)};
  Model model;
  ssmrom_summary s{};
  check(ssmrom_pipeline_run(cfg.p, out_path(g, "").c_str(), &model.p, &s));
  print_summary(s);
  Bench bench;
  check(ssmrom_bench_create(cfg.p, &bench.p));
  ssmrom_bench_info info{};
  check(ssmrom_bench_get_info(bench.p, &info));
  fmt::print("# a file samples folds truncated peak_omega peak_amplitude\n");
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    ssmrom_frc_summary f{};
    const std::string path = out_path(g, fmt::format("frc_{}.txt", i + 1));
    check(ssmrom_model_frc(model.p, amplitudes[i], lo * info.omega1, hi * info.omega1, dof, path.c_str(), &f));
    fmt::print("{:.6g} {} {} {} {} {:.9e} {:.9e}\n", amplitudes[i], path, f.samples, f.folds, f.truncated,
               f.peak_omega, f.peak_amplitude);
  }
  return kExitOk;
}

int cmd_backbone(const Globals& g, const std::string& rom_path, int mode, double rho_max, int points) {
  Rom rom;
  if (!rom_path.empty()) {
    check(ssmrom_rom_load(rom_path.c_str(), &rom.p));
  } else {
    Config cfg;
    load_config(g, cfg);
    Model model;
    ssmrom_summary s{};
    check(ssmrom_pipeline_run(cfg.p, out_path(g, "").c_str(), &model.p, &s));
    print_summary(s);
    check(ssmrom_model_rom(model.p, &rom.p));
  }
  const std::string bb = out_path(g, "backbone.txt");
  const std::string dp = out_path(g, "damping.txt");
  check(ssmrom_rom_backbone(rom.p, mode, rho_max, points, bb.c_str(), dp.c_str()));
  fmt::print("backbone {}\ndamping {}\n", bb, dp);
  return kExitOk;
}

int cmd_spectrogram(const Globals& g, std::string input, int component, int window, int hop) {
  if (input.empty()) {
    Config cfg;
    load_config(g, cfg);
    Bench bench;
    check(ssmrom_bench_create(cfg.p, &bench.p));
    input = out_path(g, "validation.txt");
    check(ssmrom_bench_simulate(bench.p, cfg.p, "validation", input.c_str(), nullptr));
  }
  Traj traj;
  check(ssmrom_trajectory_load(input.c_str(), &traj.p));
  int samples = 0;
  int comps = 0;
  check(ssmrom_trajectory_size(traj.p, &samples, &comps));
  if (samples < 2) {
    fmt::print(stderr, "ssmrom: trajectory {} has fewer than two samples\n", input);
    return kExitError;
  }
  std::vector<double> t(samples), x(samples);
  check(ssmrom_trajectory_times(traj.p, t.data()));
  check(ssmrom_trajectory_component(traj.p, component, x.data()));
  const double fs = (samples - 1) / (t.back() - t.front());
  int bins = 0;
  int frames = 0;
  const std::string path = out_path(g, "spectrogram.txt");
  check(ssmrom_spectrogram(x.data(), x.size(), fs, window, hop, path.c_str(), &bins, &frames));
  fmt::print("spectrogram {} bins {} frames {} sample_rate {:.6g}\n", path, bins, frames, fs);
  return kExitOk;
}

int cmd_bolt(const Globals& g, ssmrom_bolt_spec spec) {
  if (!g.config.empty()) {
    Config cfg;
    load_config(g, cfg);
    spec.torque = config_double(cfg, "bolt.torque", spec.torque);
    spec.pitch = config_double(cfg, "bolt.pitch", spec.pitch);
    spec.pitch_diameter = config_double(cfg, "bolt.pitch_diameter", spec.pitch_diameter);
    spec.head_diameter = config_double(cfg, "bolt.head_diameter", spec.head_diameter);
    spec.mu_thread = config_double(cfg, "bolt.mu_thread", spec.mu_thread);
    spec.mu_head = config_double(cfg, "bolt.mu_head", spec.mu_head);
  }
  double f = 0.0;
  check(ssmrom_bolt_preload(&spec, &f));
  fmt::print("preload_N {:.9g}\n", f);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral-submanifold reduced-order models of jointed oscillators"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_option("--seed", g.seed, "random seed for the training recipes")->check(CLI::NonNegativeNumber);
  app.add_option("--tol", g.tol, "integrator relative tolerance")->check(CLI::PositiveNumber);

  std::vector<std::string> recipes{"mode1", "mode2", "mixed", "validation"};
  auto* sim = app.add_subcommand("simulate", "free decays of the full-order bench");
  sim->add_option("--recipe", recipes, "mode1, mode2, mixed, validation")->capture_default_str();

  auto* eig = app.add_subcommand("eigen", "linearized spectrum at the static state");
  auto* fit = app.add_subcommand("fit", "simulate, identify and validate; writes artifacts");
  auto* val = app.add_subcommand("validate", "as fit, exit code 2 when the NMTE exceeds the threshold");

  std::vector<double> amplitudes;
  double lo = 0.9;
  double hi = 1.1;
  int dof = 0;
  auto* frc = app.add_subcommand("frc", "forced response of the fitted ROM");
  frc->add_option("--amplitude", amplitudes, "base acceleration(s), m/s^2 (default frc.amplitude or 0.2)");
  frc->add_option("--lo", lo, "lower frequency / omega1")->capture_default_str();
  frc->add_option("--hi", hi, "upper frequency / omega1")->capture_default_str();
  frc->add_option("--dof", dof, "observed DOF")->capture_default_str();

  std::string rom_path;
  int mode = 0;
  double rho_max = 0.1;
  int points = 100;
  auto* bb = app.add_subcommand("backbone", "backbone and damping curves");
  bb->add_option("--rom", rom_path, "ROM coefficient file (default: fit one)")->check(CLI::ExistingFile);
  bb->add_option("--mode", mode, "mode index, 0-based")->capture_default_str();
  bb->add_option("--rho-max", rho_max, "largest normal-form amplitude")->capture_default_str();
  bb->add_option("--points", points, "number of amplitudes")->capture_default_str();

  std::string input;
  int component = 0;
  int window = 256;
  int hop = -1;
  auto* sg = app.add_subcommand("spectrogram", "STFT magnitude of one trajectory component");
  sg->add_option("--input", input, "trajectory table (default: simulate the held-out decay)")
      ->check(CLI::ExistingFile);
  sg->add_option("--component", component, "state row")->capture_default_str();
  sg->add_option("--window", window, "window length in samples")->capture_default_str();
  sg->add_option("--hop", hop, "hop in samples (default window / 2)");

  ssmrom_bolt_spec bolt{10.1, 1e-3, 6e-3, 8e-3, 0.2, 0.2};
  auto* bp = app.add_subcommand("bolt-preload", "bolt preload from tightening torque");
  bp->add_option("--torque", bolt.torque, "N m")->capture_default_str();
  bp->add_option("--pitch", bolt.pitch, "m")->capture_default_str();
  bp->add_option("--pitch-diameter", bolt.pitch_diameter, "m")->capture_default_str();
  bp->add_option("--head-diameter", bolt.head_diameter, "m")->capture_default_str();
  bp->add_option("--mu-thread", bolt.mu_thread)->capture_default_str();
  bp->add_option("--mu-head", bolt.mu_head)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitError;
  }

  try {
    if (*sim) return cmd_simulate(g, recipes);
    if (*eig) return cmd_eigen(g);
    if (*fit) return cmd_fit(g, false);
    if (*val) return cmd_fit(g, true);
    if (*frc) return cmd_frc(g, amplitudes, lo, hi, dof);
    if (*bb) return cmd_backbone(g, rom_path, mode, rho_max, points);
    if (*sg) return cmd_spectrogram(g, input, component, window, hop);
    if (*bp) return cmd_bolt(g, bolt);
  } catch (const Failure& f) {
    return exit_code(f.status);
  } catch (const std::exception& e) {
    fmt::print(stderr, "ssmrom: {}\n", e.what());
    return kExitError;
  }
  return kExitError;
}
