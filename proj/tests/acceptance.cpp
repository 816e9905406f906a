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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "bench/integrator.hpp"
#include "forcing/forcing.hpp"
#include "geometry/geometry.hpp"
#include "normalform/normalform.hpp"
#include "oracles.hpp"
#include "pipeline/pipeline.hpp"
#include "synthetic_nf.hpp"

using namespace ssm;
namespace nf = ssm::normalform;

namespace {

const std::string kA1 = std::string(SSMROM_DATA_DIR) + "/reference_rom_4d.txt";

struct Outcome {
  bool ok = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

bool run(int id, const std::string& name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool in_time = dt < budget_s;
  const bool pass = o.ok && in_time;
  fmt::print("{} criterion {}: {} | {} | {:.3f} s (budget {:g} s)\n", pass ? "PASS" : "FAIL", id, name,
             o.detail, dt, budget_s);
  std::fflush(stdout);
  return pass;
}

// Shared between criteria 3 and 4.
std::unique_ptr<pipeline::PipelineResult> g_pipeline;

Outcome criterion1() {
  const nf::NormalFormModel m = nf::load_rom_coefficients(kA1);
  Vec rho(2), theta(2);
  rho << 1e-9, 1e-9;
  theta << 0.0, 0.0;
  const CVec g = nf::polar_rates(m, rho, theta);
  const bool rates = std::abs(g[0] - cplx(-3.5066, 692.9433)) < 1e-6 &&
                     std::abs(g[1] - cplx(-5.8897, 1231.0618)) < 1e-6;
  const std::vector<double> small{1e-6};
  const auto bb = forcing::backbone(m, small);
  const double w_err = std::abs(bb[0].omega - 692.9433) / 692.9433;
  const auto dc = forcing::modal_damping_curve(m, bb);
  const double zeta_pct = 100.0 * dc[0].zeta;
  const bool ok = rates && w_err < 1e-3 && std::abs(zeta_pct - 0.506) <= 0.001;
  return {ok, fmt::format("g1 = {:.4f}{:+.4f}i, g2 = {:.4f}{:+.4f}i, backbone w0 rel err {:.2e}, "
                          "zeta1 = {:.4f}%",
                          g[0].real(), g[0].imag(), g[1].real(), g[1].imag(), w_err, zeta_pct)};
}

Outcome criterion2() {
  // Normal form with transform, decays, and a cubic manifold over them.
  const nf::NormalFormModel truth = synth::truth_model(true);
  const auto reduced = synth::decays(truth);
  const int n2 = 12, m = 4;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss;
  spectral::SpectralSubspace sub;
  sub.V.resize(n2, m);
  for (int i = 0; i < sub.V.size(); ++i) sub.V.data()[i] = gauss(rng);
  sub.pseudo_inverse = sub.V.completeOrthogonalDecomposition().pseudoInverse();
  sub.mode_indices = {0, 1};
  sub.eigenvalues = {truth.linear(0), truth.linear(1)};
  const geometry::MonomialBasis basis(m, 2, 3);
  Mat W(n2, basis.size());
  for (int i = 0; i < W.size(); ++i) W.data()[i] = gauss(rng);
  W = (Mat::Identity(n2, n2) - sub.V * sub.pseudo_inverse) * W;

  std::vector<Trajectory> full;
  for (const auto& r : reduced) {
    Trajectory t;
    t.times = r.times;
    t.snapshots = sub.V * r.y + W * basis.evaluate(r.y);
    t.origin = Vec::Zero(n2);
    full.push_back(std::move(t));
  }
  geometry::GeometryOptions gopts;
  gopts.svd_tolerance = 1e-12;
  const geometry::ManifoldParam mp = geometry::fit_geometry(full, sub, 3, gopts);
  double w_err = 0.0;
  for (int c = 0; c < W.cols(); ++c) {
    w_err = std::max(w_err, (mp.W.col(c) - W.col(c)).norm() / W.col(c).norm());
  }

  std::vector<geometry::ReducedTrajectory> projected;
  for (std::size_t i = 0; i < full.size(); ++i) {
    geometry::ReducedTrajectory r = geometry::project(sub, full[i]);
    r.ydot = reduced[i].ydot;
    r.derivative_method = "exact";
    projected.push_back(std::move(r));
  }
  const nf::NormalFormModel fit = nf::fit_normal_form(projected, truth.tmpl);
  const double nf_err = synth::worst_relative_error(fit, truth);
  const bool ok = w_err <= 1e-6 && nf_err <= 1e-6;
  return {ok, fmt::format("manifold coeff max rel err {:.2e}, normal form + transform max rel err {:.2e}",
                          w_err, nf_err)};
}

Outcome criterion3() {
  const pipeline::PipelineConfig cfg;
  g_pipeline = std::make_unique<pipeline::PipelineResult>(pipeline::run_pipeline(cfg));
  const auto& r = *g_pipeline;
  const auto& b = r.bench;
  const double ratio = b.info.omega2 / b.info.omega1;

  // Friction activity on the held-out decay.
  bench::SimulationOptions so;
  so.rel_tol = cfg.rel_tol;
  so.output_dt = 1e-2;
  so.energy_audit = true;
  const auto sim = bench::simulate(b.model, b.equilibrium,
                                   pipeline::initial_state(b, pipeline::validation_recipe(cfg)),
                                   std::nullopt, 0.0, cfg.duration, so);
  const double share = sim.audit.friction_work / sim.audit.dissipated();
  const bool bench_ok = b.model.n >= 6 && b.model.n <= 20 && std::abs(ratio - 2.0) <= 0.1 &&
                        b.linearization.K_J.norm() > 0.0;
  const bool ok = bench_ok && r.validation_nmte.value < 10.0;
  return {ok, fmt::format("{} DOF, w2/w1 = {:.4f}, friction share of held-out dissipation {:.1f}%, "
                          "held-out NMTE {:.2f}%",
                          b.model.n, ratio, 100.0 * share, r.validation_nmte.value)};
}

Outcome criterion4() {
  if (!g_pipeline) return {false, "no fitted model (criterion 3 did not run)"};
  const auto& r = *g_pipeline;
  const double w1 = r.bench.subspace.frequencies()[0];
  const int dof = 0;
  std::string detail;
  bool ok = true;
  double worst = 0.0;
  for (double a : {0.2, 0.25}) {
    forcing::ContinuationOptions o;
    o.observation.manifold = &r.manifold;
    o.observation.dof = dof;
    const auto br = forcing::continue_frc(r.normal_form, pipeline::base_forcing(r.bench, a), 0.9 * w1,
                                          1.1 * w1, o);
    for (double q : {0.99, 1.0, 1.005}) {
      const auto rom = forcing::amplitude_at(br, q * w1);
      const auto full = pipeline::full_model_steady_amplitude(r.bench, a, q * w1,
                                                              Vec::Zero(2 * r.bench.model.n), dof);
      if (!rom || !full.converged) {
        ok = false;
        detail += fmt::format("[a={} W/w1={}: {}] ", a, q, !rom ? "no stable ROM branch" : "full model unsettled");
        continue;
      }
      const double err = (*rom - full.amplitude) / full.amplitude;
      worst = std::max(worst, std::abs(err));
      detail += fmt::format("[a={} W/w1={}: {:+.2f}%] ", a, q, 100.0 * err);
    }
  }
  ok = ok && worst < 0.05;
  return {ok, detail + fmt::format("worst {:.2f}%", 100.0 * worst)};
}

Outcome criterion5() {
  const cplx lambda(-0.05, 10.0);
  forcing::ForcingSpec spec;
  spec.unit_force = CVec::Constant(1, cplx(0.02, 0.0));
  spec.a = 1.0;
  const std::vector<cplx> ls{lambda};
  nf::NormalFormModel model = nf::linear_model(ls);
  const auto lin = forcing::continue_frc(model, spec, 9.0, 11.0);
  const double peak_err = lin.peak ? std::abs(lin.peak->rho[0] - 0.02 / 0.1) / 0.2 : 1.0;

  const double g = 10.0;
  model.tmpl.order = 3;
  model.tmpl.terms[0].push_back(nf::Monomial{{2}, {1}});
  model.N[0].push_back(cplx(0.0, g));
  const auto duf = forcing::continue_frc(model, spec, 9.5, 11.0);
  const double bb_err =
      duf.peak ? std::abs(duf.peak->omega - oracle::duffing_backbone(10.0, g, duf.peak->rho[0])) / 10.0 : 1.0;

  spec.unit_force[0] = 0.04;
  const auto over = forcing::continue_frc(model, spec, 9.5, 13.0);
  int unstable = 0;
  if (over.folds.size() == 2) {
    for (int i = over.folds[0].after_sample + 1; i <= over.folds[1].after_sample; ++i) {
      unstable += over.samples[i].stability == forcing::Stability::kUnstable ? 1 : 0;
    }
  }
  const bool ok = peak_err < 1e-8 && bb_err < 1e-6 && over.folds.size() == 2 && unstable > 0;
  return {ok, fmt::format("linear peak rel err {:.2e}, Duffing peak off backbone {:.2e}, folds {}, "
                          "unstable samples between folds {}",
                          peak_err, bb_err, over.folds.size(), unstable)};
}

Outcome criterion6() {
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = -1e300;
  for (int i = 0; i < 1000000; ++i) {
    const double fn = 100.0 * std::abs(u(rng));
    const double mu = std::abs(u(rng));
    const double kp = std::pow(10.0, 2.0 + 6.0 * std::abs(u(rng)));
    const Eigen::Vector2d anchor(1e-3 * u(rng), 1e-3 * u(rng)), disp(1e-3 * u(rng), 1e-3 * u(rng));
    const auto f = bench::friction_force(u(rng), u(rng), fn, mu, anchor, disp, kp);
    worst = std::max(worst, std::hypot(f.f_tu, f.f_tv) - mu * fn * (1.0 + 1e-12));
  }
  const bool cone = worst <= 0.0;

  const double mu = 0.5, fn = 20.0, kp = 1e4, A = 5e-3;
  Eigen::Vector2d anchor = Eigen::Vector2d::Zero();
  const int steps = 20000;
  double work = 0.0, f_prev = 0.0, u_prev = 0.0;
  for (int k = 1; k <= 2 * steps; ++k) {
    const double x = A * std::sin(2.0 * std::numbers::pi * k / steps);
    const auto r = bench::jenkins_return_map(Eigen::Vector2d(x, 0.0), anchor, fn, mu, kp, false);
    anchor = r.anchor;
    if (k > steps) work += 0.5 * (r.force.x() + f_prev) * (x - u_prev);
    f_prev = r.force.x();
    u_prev = x;
  }
  const double slip = A - mu * fn / kp;
  const double loop_err = std::abs(work - 4.0 * mu * fn * slip) / (4.0 * mu * fn * slip);

  const pipeline::PipelineConfig cfg;
  const auto b = pipeline::setup_bench(cfg);
  bench::SimulationOptions so;
  so.rel_tol = cfg.rel_tol;
  so.output_dt = 1e-2;
  so.energy_audit = true;
  const auto sim = bench::simulate(b.model, b.equilibrium,
                                   pipeline::initial_state(b, pipeline::training_recipes(cfg)[0]),
                                   std::nullopt, 0.0, 1.0, so);
  const double audit = std::abs(sim.audit.residual()) / sim.audit.dissipated();
  const bool ok = cone && loop_err < 0.01 && audit < 1e-3 && sim.audit.friction_work > 0.0;
  return {ok, fmt::format("cone max excess {:.2e} N over 1e6 evaluations, loop work rel err {:.2e}, "
                          "audit residual {:.2e} of dissipated (friction {:.3g} J)",
                          std::max(worst, 0.0), loop_err, audit, sim.audit.friction_work)};
}

Outcome criterion7() {
  std::vector<std::string> failed;
  const auto b = pipeline::setup_bench(pipeline::PipelineConfig{});
  const auto& sp = b.spectrum;
  for (int j = 0; j < sp.modes(); ++j) {
    if (j > 0 && sp.lambda(j - 1).real() < sp.lambda(j).real()) failed.push_back("ordering");
    if (sp.eigenvalues[2 * j + 1] != std::conj(sp.eigenvalues[2 * j]) ||
        sp.eigenvectors.col(2 * j + 1) != sp.phi(j).conjugate()) {
      failed.push_back("conjugate closure");
    }
    const CVec res = b.linearization.A.cast<cplx>() * sp.phi(j) - sp.lambda(j) * sp.phi(j);
    if (res.norm() > 1e-9 * std::abs(sp.lambda(j))) failed.push_back("eigen residual");
  }
  for (int m = 1; m <= 6; ++m) {
    const geometry::MonomialBasis basis(m, 1, 9);
    for (int i = 1; i <= 9; ++i) {
      if (basis.counts[i - 1] != oracle::binomial(m + i - 1, i)) failed.push_back("monomial count");
    }
  }
  // Template: phase-rotation equivariance and conjugate symmetry.
  const std::vector<double> om{1.0, 2.0};
  const auto tmpl = nf::nf_structure(2, 7, spectral::detect_resonances(om, 7, 0.01));
  for (int j = 0; j < 2; ++j) {
    for (const auto& mono : tmpl.terms[j]) {
      if ((mono.a[0] - mono.b[0]) + 2 * (mono.a[1] - mono.b[1]) != (j == 0 ? 1 : 2)) {
        failed.push_back("template phase");
      }
    }
  }
  nf::NormalFormModel real_model;
  real_model.tmpl = tmpl;
  for (int j = 0; j < 2; ++j) {
    real_model.N.emplace_back();
    for (std::size_t k = 0; k < tmpl.terms[j].size(); ++k) real_model.N[j].push_back(0.1 * (k + 1));
  }
  CVec z(2);
  z << cplx(0.3, 0.2), cplx(-0.1, 0.25);
  if ((nf::nf_rhs(real_model, z.conjugate()) - nf::nf_rhs(real_model, z).conjugate()).norm() > 1e-14) {
    failed.push_back("conjugate symmetry");
  }
  Mat ref = Mat::Random(4, 40);
  int imax = 0;
  ref.colwise().norm().maxCoeff(&imax);
  const Mat shifted = ref.colwise() + 0.3 * ref.col(imax);
  if (pipeline::nmte(ref, ref).value != 0.0) failed.push_back("NMTE identity");
  if (std::abs(pipeline::nmte(ref, shifted).value - 30.0) > 1e-10) failed.push_back("NMTE offset");
  try {
    pipeline::nmte(Mat::Zero(4, 5), Mat::Ones(4, 5));
    failed.push_back("NMTE zero reference");
  } catch (const Error&) {
  }
  std::string detail = fmt::format("{} bench modes, monomial counts m<=6 i<=9, template order 7", sp.modes());
  for (const auto& f : failed) detail += "; failed: " + f;
  return {failed.empty(), detail};
}

Outcome criterion8() {
  const pipeline::BoltSpec spec{10.1, 1e-3, 6e-3, 8e-3, 0.2, 0.2};
  const double f = pipeline::bolt_preload(spec);
  const double ref = oracle::bolt_preload(10.1, 1e-3, 6e-3, 8e-3, 0.2, 0.2);
  const bool ok = std::abs(f - ref) <= 1e-12 * ref && std::abs(f - 6110.0) < 10.0;
  return {ok, fmt::format("F = {:.2f} N", f)};
}

}  // namespace

int main() {
  int failures = 0;
  failures += !run(1, "reference ROM linear limit", 1.0, criterion1);
  failures += !run(2, "synthetic order-3 recovery", 30.0, criterion2);
  failures += !run(3, "jointed bench held-out NMTE", 600.0, criterion3);
  failures += !run(4, "forced response vs full model", 1800.0, criterion4);
  failures += !run(5, "continuation oracles", 10.0, criterion5);
  failures += !run(6, "friction cone, hysteresis, energy audit", 60.0, criterion6);
  failures += !run(7, "structural properties", 10.0, criterion7);
  failures += !run(8, "bolt preload", 1.0, criterion8);
  fmt::print("{} of 8 criteria passed\n", 8 - failures);
  return failures == 0 ? 0 : 1;
}
