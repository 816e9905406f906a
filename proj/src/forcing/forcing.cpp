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

#include "forcing/forcing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include <fmt/format.h>

namespace ssm::forcing {

using normalform::Monomial;
using normalform::NormalFormModel;

Vec first_order_force(const Mat& M, const Vec& p) {
  require(M.rows() == M.cols() && M.rows() == p.size(), "first_order_force: dimension mismatch");
  Eigen::LLT<Mat> llt(M);
  if (llt.info() != Eigen::Success) fail(ErrorKind::kInvalidArgument, "first_order_force: M must be SPD");
  Vec out = Vec::Zero(2 * p.size());
  out.tail(p.size()) = llt.solve(p);
  return out;
}

CVec project_forcing(const Vec& p_first_order, const spectral::SpectralSubspace& subspace) {
  require(p_first_order.size() == subspace.pseudo_inverse.cols(),
          "project_forcing: force dimension does not match the subspace");
  return normalform::xi_from_y(subspace.pseudo_inverse * p_first_order);
}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::kStable: return "stable";
    case Stability::kUnstable: return "unstable";
    case Stability::kMarginal: return "marginal";
  }
  return "?";
}

Stability stability_flags(const Mat& J, double marginal_tol) {
  const CVec ev = Eigen::EigenSolver<Mat>(J, false).eigenvalues();
  const double tol = marginal_tol * std::max(1.0, J.norm());
  double max_re = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ev.size(); ++i) max_re = std::max(max_re, ev[i].real());
  if (std::abs(max_re) <= tol) return Stability::kMarginal;
  return max_re < 0.0 ? Stability::kStable : Stability::kUnstable;
}

std::vector<int> default_lock(const NormalFormModel& model) {
  const double w0 = std::abs(model.linear(0).imag());
  std::vector<int> r;
  for (int j = 0; j < model.modes(); ++j) {
    const double w = std::abs(model.linear(j).imag());
    r.push_back(w0 > 0.0 ? std::max(1, static_cast<int>(std::lround(w / w0))) : 1);
  }
  return r;
}

namespace {

// Keeps the terms that are stationary in the frame z_j = u_j exp(i r_j Omega t).
NormalFormModel locked_model(const NormalFormModel& model, const std::vector<int>& lock, int* dropped) {
  NormalFormModel out = model;
  int nd = 0;
  for (int j = 0; j < model.modes(); ++j) {
    out.tmpl.terms[j].clear();
    out.N[j].clear();
    for (std::size_t k = 0; k < model.tmpl.terms[j].size(); ++k) {
      const Monomial& m = model.tmpl.terms[j][k];
      int s = 0;
      for (int i = 0; i < model.modes(); ++i) s += (m.a[i] - m.b[i]) * lock[i];
      if (s == lock[j]) {
        out.tmpl.terms[j].push_back(m);
        out.N[j].push_back(model.N[j][k]);
      } else if (model.N[j][k] != cplx(0.0)) {
        ++nd;
      }
    }
  }
  if (dropped) *dropped = nd;
  return out;
}

void check_lock(const NormalFormModel& model, const std::vector<int>& lock) {
  require(static_cast<int>(lock.size()) == model.modes(), "forcing: lock ratios must match mode count");
  for (int r : lock) require(r >= 1, "forcing: lock ratios must be positive");
}

CVec rhs_locked(const NormalFormModel& locked, const CVec& u, double omega, const CVec& force,
                const std::vector<int>& lock) {
  CVec g = normalform::nf_rhs(locked, u);
  for (int j = 0; j < locked.modes(); ++j) {
    g[j] -= cplx(0.0, lock[j] * omega) * u[j];
    if (lock[j] == 1 && force.size() == u.size()) g[j] += 0.5 * force[j];
  }
  return g;
}

Mat jac_locked(const NormalFormModel& locked, const CVec& u, double omega, const std::vector<int>& lock) {
  const int M = locked.modes();
  Mat J = normalform::nf_jacobian(locked, u);
  for (int j = 0; j < M; ++j) {
    J(j, M + j) += lock[j] * omega;
    J(M + j, j) -= lock[j] * omega;
  }
  return J;
}

Vec pack(const CVec& u) {
  Vec x(2 * u.size());
  x << u.real(), u.imag();
  return x;
}

CVec unpack(const Vec& x, int M) {
  CVec u(M);
  for (int i = 0; i < M; ++i) u[i] = cplx(x[i], x[M + i]);
  return u;
}

// g_j = rho_dot_j / rho_j + i theta_dot_j for one equation, skipping terms
// that vanish at zero amplitude.
cplx equation_rate(const NormalFormModel& model, int j, const Vec& rho, const Vec& theta) {
  cplx g = 0.0;
  for (std::size_t k = 0; k < model.tmpl.terms[j].size(); ++k) {
    const Monomial& m = model.tmpl.terms[j][k];
    double mag = 1.0;
    double ph = 0.0;
    bool zero = false;
    for (int i = 0; i < model.modes(); ++i) {
      const int r = m.a[i] + m.b[i] - (i == j);
      if (r > 0 && rho[i] == 0.0) zero = true;
      if (r < 0 && rho[i] == 0.0) {
        fail(ErrorKind::kNumeric, "backbone: singular term at zero amplitude");
      }
      mag *= r == 0 ? 1.0 : std::pow(rho[i], r);
      ph += (m.a[i] - m.b[i] - (i == j)) * theta[i];
    }
    if (!zero) g += model.N[j][k] * std::polar(mag, ph);
  }
  return g;
}

// Continuation state in scaled units: x = [Re u, Im u] / u_scale,
// Omega / w_scale.
struct Scaled {
  const NormalFormModel* locked;
  CVec force;
  std::vector<int> lock;
  double us;
  double ws;
  int M;

  Vec G(const Vec& X) const {
    const CVec u = unpack(X.head(2 * M), M) * us;
    const CVec g = rhs_locked(*locked, u, X[2 * M] * ws, force, lock);
    return pack(g) / (us * ws);
  }
  Mat J(const Vec& X) const {
    const CVec u = unpack(X.head(2 * M), M) * us;
    const double om = X[2 * M] * ws;
    Mat out(2 * M, 2 * M + 1);
    out.leftCols(2 * M) = jac_locked(*locked, u, om, lock) / ws;
    Vec dO(2 * M);
    for (int j = 0; j < M; ++j) {
      const cplx d = cplx(0.0, -lock[j]) * u[j];
      dO[j] = d.real();
      dO[M + j] = d.imag();
    }
    out.col(2 * M) = dO / us;
    return out;
  }
  Vec tangent(const Vec& X, const Vec& prev) const {
    const Mat Jx = J(X);
    Mat A(2 * M + 1, 2 * M + 1);
    A.topRows(2 * M) = Jx;
    A.row(2 * M) = prev.transpose();
    Vec rhs = Vec::Zero(2 * M + 1);
    rhs[2 * M] = 1.0;
    Vec t = A.fullPivLu().solve(rhs);
    t.normalize();
    if (t.dot(prev) < 0.0) t = -t;
    return t;
  }
  // Newton on G = 0 plus the arclength condition; returns iterations or -1.
  int correct(Vec& X, const Vec& pred, const Vec& tau, double tol, int max_it, bool fix_omega) const {
    for (int it = 0; it <= max_it; ++it) {
      const Vec g = G(X);
      const double con = fix_omega ? X[2 * M] - pred[2 * M] : tau.dot(X - pred);
      if (!g.allFinite()) return -1;
      if (g.norm() <= tol && std::abs(con) <= tol) return it;
      if (it == max_it) break;
      Mat A(2 * M + 1, 2 * M + 1);
      A.topRows(2 * M) = J(X);
      if (fix_omega) {
        A.row(2 * M).setZero();
        A(2 * M, 2 * M) = 1.0;
      } else {
        A.row(2 * M) = tau.transpose();
      }
      Vec r(2 * M + 1);
      r << g, con;
      const Vec d = A.fullPivLu().solve(r);
      if (!d.allFinite()) return -1;
      X -= d;
    }
    return -1;
  }
};

}  // namespace

CVec rotating_rhs(const NormalFormModel& model, const CVec& u, double omega, const CVec& force,
                  const std::vector<int>& lock) {
  check_lock(model, lock);
  return rhs_locked(locked_model(model, lock, nullptr), u, omega, force, lock);
}

Mat rotating_jacobian(const NormalFormModel& model, const CVec& u, double omega,
                      const std::vector<int>& lock) {
  check_lock(model, lock);
  return jac_locked(locked_model(model, lock, nullptr), u, omega, lock);
}

std::optional<double> amplitude_at(const FRCBranch& branch, double omega) {
  std::optional<double> best;
  const auto& s = branch.samples;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const double w0 = s[i].omega;
    const double w1 = s[i + 1].omega;
    if (w0 == w1 || (w0 - omega) * (w1 - omega) > 0.0) continue;
    if (s[i].stability != Stability::kStable || s[i + 1].stability != Stability::kStable) continue;
    const double t = (omega - w0) / (w1 - w0);
    const double a = s[i].amplitude + t * (s[i + 1].amplitude - s[i].amplitude);
    if (!best || a > *best) best = a;
  }
  return best;
}

double physical_amplitude(const NormalFormModel& model, const Observation& obs, const CVec& u,
                          const std::vector<int>& lock, double omega) {
  require(obs.manifold != nullptr, "physical_amplitude: no manifold");
  require(obs.dof >= 0 && obs.dof < obs.manifold->V.rows(), "physical_amplitude: observation index out of range");
  const int K = std::max(8, obs.samples_per_period);
  const int M = model.modes();
  double sum = 0.0;
  CVec guess;
  for (int k = 0; k < K; ++k) {
    const double phase = 2.0 * std::numbers::pi * k / K;  // Omega t
    CVec z(M);
    for (int j = 0; j < M; ++j) z[j] = u[j] * std::polar(1.0, lock[j] * phase);
    const CVec xi = normalform::transform(model, z, k ? &guess : nullptr);
    guess = xi;
    const Vec x = geometry::reconstruct(*obs.manifold, normalform::y_from_xi(xi));
    sum += x[obs.dof] * x[obs.dof];
  }
  (void)omega;
  return std::sqrt(2.0 * sum / K);
}

FRCBranch continue_frc(const NormalFormModel& model, const ForcingSpec& spec, double omega_lo,
                       double omega_hi, const ContinuationOptions& opts) {
  const int M = model.modes();
  require(spec.unit_force.size() == M, "continue_frc: reduced force dimension mismatch");
  require(omega_hi > omega_lo && omega_lo > 0.0, "continue_frc: need 0 < omega_lo < omega_hi");
  FRCBranch br;
  br.lock = opts.lock.empty() ? default_lock(model) : opts.lock;
  check_lock(model, br.lock);
  int dropped = 0;
  const NormalFormModel locked = locked_model(model, br.lock, &dropped);
  if (dropped > 0) {
    br.warnings.push_back(fmt::format("{} normal-form terms are not stationary under the lock ratios "
                                      "and were averaged out", dropped));
  }
  const CVec force = spec.force();
  bool forced_any = false;
  for (int j = 0; j < M; ++j) {
    if (br.lock[j] == 1 && std::abs(force[j]) > 0.0) forced_any = true;
    if (br.lock[j] != 1 && std::abs(force[j]) > 0.0) {
      br.warnings.push_back(fmt::format("forcing on mode {} is not resonant with the lock and is dropped", j + 1));
    }
  }
  Scaled S{&locked, force, br.lock, 1.0, 1.0, M};
  // Omega is measured in half-power widths of the first mode so that a step
  // resolves the peak and the tails alike.
  {
    const double w = std::abs(model.linear(0).imag());
    const double d = std::abs(model.linear(0).real());
    S.ws = std::min(w, std::max(d, 1e-4 * w));
    if (!(S.ws > 0.0)) S.ws = omega_hi;
  }
  double us = 0.0;
  for (int j = 0; j < M; ++j) {
    if (br.lock[j] == 1) us = std::max(us, 0.5 * std::abs(force[j]) / std::max(std::abs(model.linear(j).real()), 1e-12 * S.ws));
  }
  S.us = (forced_any && us > 0.0) ? us : 1.0;

  auto make_sample = [&](const Vec& X) {
    FRCSample s;
    s.omega = X[2 * M] * S.ws;
    s.u = unpack(X.head(2 * M), M) * S.us;
    normalform::to_polar(s.u, s.rho, s.psi);
    s.residual = S.G(X).norm();
    s.stability = stability_flags(jac_locked(locked, s.u, s.omega, br.lock));
    s.amplitude = opts.observation.manifold
                      ? physical_amplitude(model, opts.observation, s.u, br.lock, s.omega)
                      : s.rho[0];
    try {
      s.zeta1 = normalform::instantaneous_damping_frequency(model, s.rho, s.psi).zeta[0];
    } catch (const Error&) {
      s.zeta1 = std::numeric_limits<double>::quiet_NaN();
    }
    if (model.amplitude_max.size() == M && opts.envelope_factor > 0.0) {
      for (int j = 0; j < M; ++j) {
        if (s.rho[j] > opts.envelope_factor * model.amplitude_max[j]) s.outside_envelope = true;
      }
    }
    return s;
  };

  // Starting point at omega_lo from the linear response.
  Vec X(2 * M + 1);
  {
    CVec u0 = CVec::Zero(M);
    for (int j = 0; j < M; ++j) {
      if (br.lock[j] == 1) u0[j] = -0.5 * force[j] / (model.linear(j) - cplx(0.0, omega_lo));
    }
    X << pack(u0) / S.us, omega_lo / S.ws;
    Vec e = Vec::Zero(2 * M + 1);
    e[2 * M] = 1.0;
    if (S.correct(X, X, e, opts.newton_tol, 50, true) < 0) {
      fail(ErrorKind::kSolver, fmt::format("continue_frc: no steady state found at Omega = {}", omega_lo));
    }
  }
  Vec e_omega = Vec::Zero(2 * M + 1);
  e_omega[2 * M] = 1.0;
  Vec tau = S.tangent(X, e_omega);
  if (tau[2 * M] < 0.0) tau = -tau;
  br.samples.push_back(make_sample(X));
  std::vector<Vec> states{X};
  std::vector<Vec> tangents{tau};

  // Secant search on the step length from (X0, tau0) for a sign change of
  // `indicator`, which takes the corrected state and its tangent.
  auto refine = [&](const Vec& X0, const Vec& tau0, double h, auto indicator) -> std::optional<Vec> {
    double a = 0.0, b = h;
    double fa = indicator(X0, tau0);
    Vec Xb = X0 + b * tau0;
    if (S.correct(Xb, X0 + b * tau0, tau0, opts.newton_tol, opts.max_newton, false) < 0) return std::nullopt;
    double fb = indicator(Xb, S.tangent(Xb, tau0));
    if (fa * fb > 0.0) return std::nullopt;
    Vec best = Xb;
    // Illinois variant of regula falsi.
    for (int it = 0; it < 60; ++it) {
      double c = b - fb * (b - a) / (fb - fa);
      if (!std::isfinite(c) || c <= std::min(a, b) || c >= std::max(a, b)) c = 0.5 * (a + b);
      Vec Xc = X0 + c * tau0;
      if (S.correct(Xc, X0 + c * tau0, tau0, opts.newton_tol, opts.max_newton, false) < 0) return std::nullopt;
      const double fc = indicator(Xc, S.tangent(Xc, tau0));
      best = Xc;
      if (std::abs(fc) < 1e-14 || std::abs(b - a) < 1e-15 * h) break;
      if (fc * fb < 0.0) {
        a = b;
        fa = fb;
      } else {
        fa *= 0.5;
      }
      b = c;
      fb = fc;
    }
    return best;
  };
  auto omega_slope = [&](const Vec&, const Vec& t) { return t[2 * M]; };
  auto amp_slope = [&](const Vec& Xs, const Vec& t) { return Xs[0] * t[0] + Xs[M] * t[M]; };

  double h = opts.initial_step;
  for (int step = 0; step < opts.max_steps; ++step) {
    Vec Xn;
    int iters = -1;
    bool last = false;
    while (true) {
      const Vec pred = X + h * tau;
      Xn = pred;
      if (pred[2 * M] * S.ws > omega_hi) {
        Xn[2 * M] = omega_hi / S.ws;
        iters = S.correct(Xn, Xn, tau, opts.newton_tol, opts.max_newton, true);
        last = true;
      } else {
        iters = S.correct(Xn, pred, tau, opts.newton_tol, opts.max_newton, false);
      }
      // Accept only forward progress of bounded length; on flat stretches a
      // long step can otherwise converge onto an earlier part of the branch.
      if (iters >= 0 && (Xn - X).norm() <= 2.0 * h + 1e-12 &&
          (Xn - X).dot(tau) > (last ? 0.0 : 0.25 * h)) {
        break;
      }
      last = false;
      h *= 0.5;
      if (h < opts.min_step) {
        br.aborted = true;
        br.warnings.push_back(fmt::format("continue_frc: step size below {:.1e} near Omega = {:.6g}",
                                          opts.min_step, X[2 * M] * S.ws));
        break;
      }
    }
    if (br.aborted) break;
    Vec tn = S.tangent(Xn, tau);
    FRCSample s = make_sample(Xn);
    if (opts.refine && !last) {
      if (tau[2 * M] * tn[2 * M] < 0.0) {
        if (auto f = refine(X, tau, (Xn - X).dot(tau), omega_slope)) {
          FRCSample fs = make_sample(*f);
          br.folds.push_back({fs.omega, fs.amplitude, static_cast<int>(br.samples.size()) - 1});
        } else {
          br.folds.push_back({s.omega, s.amplitude, static_cast<int>(br.samples.size()) - 1});
        }
      }
      if (amp_slope(X, tau) > 0.0 && amp_slope(Xn, tn) <= 0.0) {
        if (auto p = refine(X, tau, (Xn - X).dot(tau), amp_slope)) {
          FRCSample ps = make_sample(*p);
          if (!br.peak || ps.rho[0] > br.peak->rho[0]) br.peak = ps;
        }
      }
    }
    if (s.outside_envelope) {
      br.truncated = true;
      br.warnings.push_back(fmt::format("continue_frc: branch leaves the fitted amplitude envelope at "
                                        "Omega = {:.6g}; truncated",
                                        s.omega));
      break;
    }
    br.samples.push_back(s);
    X = Xn;
    tau = tn;
    if (last || X[2 * M] * S.ws < omega_lo) break;
    if (iters <= 3) {
      h = std::min(h * 1.5, opts.max_step);
    } else if (iters > 6) {
      h *= 0.5;
    }
  }
  if (!br.peak) {
    auto it = std::max_element(br.samples.begin(), br.samples.end(),
                               [](const FRCSample& a, const FRCSample& b) { return a.rho[0] < b.rho[0]; });
    if (it != br.samples.end()) br.peak = *it;
  }
  return br;
}

std::vector<BackbonePoint> backbone(const NormalFormModel& model, const std::vector<double>& rho_values,
                                    const BackboneOptions& opts) {
  const int M = model.modes();
  const int j = opts.mode;
  require(j >= 0 && j < M, "backbone: mode index out of range");
  const std::vector<int> lock = opts.lock.empty() ? default_lock(model) : opts.lock;
  check_lock(model, lock);
  const double w0 = model.linear(j).imag();
  require(w0 != 0.0, "backbone: mode has zero linear frequency");
  std::vector<BackbonePoint> out;
  const NormalFormModel locked = locked_model(model, lock, nullptr);

  // Slaved unknowns: u_k (k != j) and Omega.
  std::vector<int> others;
  for (int k = 0; k < M; ++k) {
    if (k != j) others.push_back(k);
  }
  const int K = static_cast<int>(others.size());
  Vec v = Vec::Zero(2 * K + 1);
  v[2 * K] = w0 / lock[j];

  for (double rho : rho_values) {
    require(rho >= 0.0, "backbone: amplitudes must be non-negative");
    BackbonePoint bp;
    CVec u = CVec::Zero(M);
    u[j] = rho;
    double omega_mode = 0.0;
    cplx g = 0.0;
    if (!opts.slave_modes || K == 0 || rho == 0.0) {
      Vec r = Vec::Zero(M), th = Vec::Zero(M);
      r[j] = rho;
      g = rho > 0.0 ? equation_rate(model, j, r, th) : model.linear(j);
      omega_mode = g.imag();
    } else {
      auto residual = [&](const Vec& w) {
        CVec uu = CVec::Zero(M);
        uu[j] = rho;
        for (int q = 0; q < K; ++q) uu[others[q]] = cplx(w[q], w[K + q]);
        const double om = w[2 * K];
        const CVec n = normalform::nf_rhs(locked, uu);
        Vec res(2 * K + 1);
        for (int q = 0; q < K; ++q) {
          const cplx e = n[others[q]] - cplx(0.0, lock[others[q]] * om) * uu[others[q]];
          res[q] = e.real() / w0;
          res[K + q] = e.imag() / w0;
        }
        res[2 * K] = (n[j].imag() / rho - lock[j] * om) / w0;
        return res;
      };
      bool ok = false;
      for (int it = 0; it < 60; ++it) {
        const Vec r0 = residual(v);
        if (r0.norm() < 1e-13 * std::max(1.0, rho)) {
          ok = true;
          break;
        }
        Mat J(2 * K + 1, 2 * K + 1);
        for (int c = 0; c < 2 * K + 1; ++c) {
          const double hstep = 1e-7 * std::max(std::abs(v[c]), c == 2 * K ? 1.0 : std::max(rho, 1e-12));
          Vec vp = v, vm = v;
          vp[c] += hstep;
          vm[c] -= hstep;
          J.col(c) = (residual(vp) - residual(vm)) / (2.0 * hstep);
        }
        v -= J.fullPivLu().solve(r0);
        if (!v.allFinite()) break;
      }
      if (!ok) fail(ErrorKind::kSolver, fmt::format("backbone: slaved-mode solve failed at rho = {:.4e}", rho));
      for (int q = 0; q < K; ++q) u[others[q]] = cplx(v[q], v[K + q]);
      g = normalform::nf_rhs(model, u)[j] / rho;
      omega_mode = g.imag();
    }
    normalform::to_polar(u, bp.rho, bp.psi);
    bp.omega = omega_mode;
    bp.omega_normalized = omega_mode / w0;
    bp.zeta = std::abs(g) > 0.0 ? -g.real() / std::abs(g) : 0.0;
    bp.amplitude = opts.observation.manifold
                       ? physical_amplitude(model, opts.observation, u, lock, omega_mode / lock[j])
                       : rho;
    out.push_back(bp);
  }
  return out;
}

std::vector<DampingPoint> modal_damping_curve(const NormalFormModel& model,
                                              const std::vector<BackbonePoint>& curve, int mode) {
  std::vector<DampingPoint> out;
  for (const auto& p : curve) {
    DampingPoint d;
    d.amplitude = p.amplitude;
    d.rho = p.rho[mode];
    d.zeta = p.zeta;
    d.omega = p.omega;
    (void)model;
    out.push_back(d);
  }
  return out;
}

std::vector<DampingPoint> modal_damping_curve(const NormalFormModel& model, const FRCBranch& branch,
                                              int mode) {
  std::vector<DampingPoint> out;
  for (const auto& s : branch.samples) {
    DampingPoint d;
    d.amplitude = s.amplitude;
    d.rho = s.rho[mode];
    try {
      const auto df = normalform::instantaneous_damping_frequency(model, s.rho, s.psi);
      d.zeta = df.zeta[mode];
      d.omega = df.omega[mode];
    } catch (const Error&) {
      continue;
    }
    out.push_back(d);
  }
  return out;
}

void write_frc_table(const FRCBranch& branch, double omega0, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) fail(ErrorKind::kIo, "cannot write " + path);
  fmt::print(f, "# omega_rad_s omega_ratio amplitude rho1 rho2 zeta1 stability\n");
  for (const auto& s : branch.samples) {
    fmt::print(f, "{:.12e} {:.12e} {:.12e} {:.12e} {:.12e} {:.12e} {}\n", s.omega, s.omega / omega0,
               s.amplitude, s.rho[0], s.rho.size() > 1 ? s.rho[1] : 0.0, s.zeta1, to_string(s.stability));
  }
  for (const auto& fp : branch.folds) fmt::print(f, "# fold {:.12e} {:.12e}\n", fp.omega, fp.amplitude);
  if (branch.peak) fmt::print(f, "# peak {:.12e} {:.12e}\n", branch.peak->omega, branch.peak->amplitude);
  if (branch.truncated) fmt::print(f, "# truncated at the amplitude envelope\n");
  if (branch.aborted) fmt::print(f, "# aborted: step size floor reached\n");
  std::fclose(f);
}

void write_backbone_table(const std::vector<BackbonePoint>& curve, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) fail(ErrorKind::kIo, "cannot write " + path);
  fmt::print(f, "# omega_rad_s omega_normalized amplitude rho1 rho2 zeta1\n");
  for (const auto& p : curve) {
    fmt::print(f, "{:.12e} {:.12e} {:.12e} {:.12e} {:.12e} {:.12e}\n", p.omega, p.omega_normalized,
               p.amplitude, p.rho[0], p.rho.size() > 1 ? p.rho[1] : 0.0, p.zeta);
  }
  std::fclose(f);
}

void write_damping_table(const std::vector<DampingPoint>& curve, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) fail(ErrorKind::kIo, "cannot write " + path);
  fmt::print(f, "# amplitude rho zeta omega_rad_s\n");
  for (const auto& p : curve) {
    fmt::print(f, "{:.12e} {:.12e} {:.12e} {:.12e}\n", p.amplitude, p.rho, p.zeta, p.omega);
  }
  std::fclose(f);
}

}  // namespace ssm::forcing
