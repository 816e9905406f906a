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

#include "normalform/normalform.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

#include "normalform/poly.hpp"

namespace ssm::normalform {

namespace detail {

Powers::Powers(const CVec& z, int max_order)
    : modes_(static_cast<int>(z.size())), stride_(max_order + 2) {
  table_.assign(2 * modes_ * stride_, cplx(0.0));
  for (int i = 0; i < modes_; ++i) {
    const cplx w[2] = {z[i], std::conj(z[i])};
    for (int s = 0; s < 2; ++s) {
      const int var = i + s * modes_;
      table_[var * stride_] = 1.0;
      for (int e = 1; e < stride_; ++e) table_[var * stride_ + e] = table_[var * stride_ + e - 1] * w[s];
    }
  }
}

cplx Powers::monomial(const Monomial& m) const {
  cplx v = 1.0;
  for (int i = 0; i < modes_; ++i) v *= pw(i, m.a[i]) * pw(i + modes_, m.b[i]);
  return v;
}

cplx Powers::d_dz(const Monomial& m, int i) const {
  if (m.a[i] == 0) return 0.0;
  cplx v = static_cast<double>(m.a[i]);
  for (int k = 0; k < modes_; ++k) v *= pw(k, m.a[k] - (k == i)) * pw(k + modes_, m.b[k]);
  return v;
}

cplx Powers::d_dzbar(const Monomial& m, int i) const {
  if (m.b[i] == 0) return 0.0;
  cplx v = static_cast<double>(m.b[i]);
  for (int k = 0; k < modes_; ++k) v *= pw(k, m.a[k]) * pw(k + modes_, m.b[k] - (k == i));
  return v;
}

int max_order(const std::vector<std::vector<Monomial>>& terms) {
  int o = 1;
  for (const auto& eq : terms) {
    for (const auto& m : eq) o = std::max(o, m.order());
  }
  return o;
}

CVec evaluate(const std::vector<std::vector<Monomial>>& terms,
              const std::vector<std::vector<cplx>>& coeffs, const Powers& pw) {
  CVec out = CVec::Zero(static_cast<Eigen::Index>(terms.size()));
  for (std::size_t j = 0; j < terms.size(); ++j) {
    cplx s = 0.0;
    for (std::size_t k = 0; k < terms[j].size(); ++k) s += coeffs[j][k] * pw.monomial(terms[j][k]);
    out[j] = s;
  }
  return out;
}

void wirtinger(const std::vector<std::vector<Monomial>>& terms,
               const std::vector<std::vector<cplx>>& coeffs, const Powers& pw, CMat& P, CMat& Q) {
  const int M = static_cast<int>(terms.size());
  P = CMat::Zero(M, M);
  Q = CMat::Zero(M, M);
  for (int j = 0; j < M; ++j) {
    for (std::size_t k = 0; k < terms[j].size(); ++k) {
      for (int i = 0; i < M; ++i) {
        P(j, i) += coeffs[j][k] * pw.d_dz(terms[j][k], i);
        Q(j, i) += coeffs[j][k] * pw.d_dzbar(terms[j][k], i);
      }
    }
  }
}

Mat real_jacobian(const CMat& P, const CMat& Q) {
  const Eigen::Index M = P.rows();
  // df = P dz + Q dzbar, dz = dx + i dy
  const CMat dx = P + Q;
  const CMat dy = cplx(0.0, 1.0) * (P - Q);
  Mat J(2 * M, 2 * M);
  J.topLeftCorner(M, M) = dx.real();
  J.topRightCorner(M, M) = dy.real();
  J.bottomLeftCorner(M, M) = dx.imag();
  J.bottomRightCorner(M, M) = dy.imag();
  return J;
}

}  // namespace detail

using detail::Powers;

int Monomial::order() const {
  int o = 0;
  for (int v : a) o += v;
  for (int v : b) o += v;
  return o;
}

int NormalFormTemplate::size() const {
  int s = 0;
  for (const auto& t : terms) s += static_cast<int>(t.size());
  return s;
}

bool NormalFormTemplate::resonant(int eq, const std::vector<int>& phase) const {
  const auto& list = phases[eq];
  return std::find(list.begin(), list.end(), phase) != list.end();
}

namespace {

std::vector<int> phase_of(const Monomial& m) {
  std::vector<int> k(m.a.size());
  for (std::size_t i = 0; i < k.size(); ++i) k[i] = m.a[i] - m.b[i];
  return k;
}

std::vector<Monomial> all_monomials(int M, int lo, int hi) {
  std::vector<Monomial> out;
  if (lo > hi) return out;
  const geometry::MonomialBasis basis(2 * M, lo, hi);
  for (const auto& e : basis.exponents) {
    Monomial m;
    m.a.assign(e.begin(), e.begin() + M);
    m.b.assign(e.begin() + M, e.end());
    out.push_back(std::move(m));
  }
  return out;
}

Monomial unit(int M, int j) {
  Monomial m;
  m.a.assign(M, 0);
  m.b.assign(M, 0);
  m.a[j] = 1;
  return m;
}

}  // namespace

NormalFormTemplate nf_structure(int modes, int f, const spectral::ResonanceSet& resonances) {
  require(modes >= 1, "nf_structure: need at least one mode");
  require(f >= 1, "nf_structure: order must be >= 1");
  require(resonances.omegas.empty() || static_cast<int>(resonances.omegas.size()) == modes,
          "nf_structure: resonance set dimension does not match mode count");
  NormalFormTemplate t;
  t.modes = modes;
  t.order = f;
  t.terms.resize(modes);
  t.phases.resize(modes);
  const auto monos = all_monomials(modes, 1, f);
  for (int j = 0; j < modes; ++j) {
    std::vector<int> self(modes, 0);
    self[j] = 1;
    t.phases[j].push_back(self);
    for (const auto& r : resonances.relations) {
      if (r.target == j && r.k != self) t.phases[j].push_back(r.k);
    }
    t.terms[j].push_back(unit(modes, j));
    for (const auto& m : monos) {
      if (m == t.terms[j].front()) continue;
      if (t.resonant(j, phase_of(m))) t.terms[j].push_back(m);
    }
  }
  return t;
}

cplx NormalFormModel::linear(int j) const {
  const Monomial u = unit(modes(), j);
  for (std::size_t k = 0; k < tmpl.terms[j].size(); ++k) {
    if (tmpl.terms[j][k] == u) return N[j][k];
  }
  return 0.0;
}

NormalFormModel linear_model(std::span<const cplx> eigenvalues) {
  const int M = static_cast<int>(eigenvalues.size());
  require(M >= 1, "linear_model: no eigenvalues");
  NormalFormModel m;
  m.tmpl.modes = M;
  m.tmpl.order = 1;
  m.tmpl.terms.resize(M);
  m.tmpl.phases.resize(M);
  m.N.resize(M);
  m.h_terms.resize(M);
  m.H.resize(M);
  for (int j = 0; j < M; ++j) {
    m.tmpl.terms[j].push_back(unit(M, j));
    m.tmpl.phases[j].push_back(phase_of(unit(M, j)));
    m.N[j].push_back(eigenvalues[j]);
  }
  m.provenance = "linear";
  return m;
}

CVec nf_rhs(const NormalFormModel& model, const CVec& z) {
  require(z.size() == model.modes(), "nf_rhs: state dimension mismatch");
  require(z.allFinite(), "nf_rhs: non-finite state");
  const Powers pw(z, model.tmpl.order);
  return detail::evaluate(model.tmpl.terms, model.N, pw);
}

Mat nf_jacobian(const NormalFormModel& model, const CVec& z) {
  const Powers pw(z, model.tmpl.order);
  CMat P, Q;
  detail::wirtinger(model.tmpl.terms, model.N, pw, P, Q);
  return detail::real_jacobian(P, Q);
}

namespace {

// Term-by-term polar rates. Terms carrying rho_i^-1 with rho_i = 0 either
// raise (strict) or are dropped.
CVec polar_terms(const NormalFormModel& model, const Vec& rho, const Vec& theta, bool strict) {
  const int M = model.modes();
  CVec g = CVec::Zero(M);
  for (int j = 0; j < M; ++j) {
    for (std::size_t k = 0; k < model.tmpl.terms[j].size(); ++k) {
      const Monomial& m = model.tmpl.terms[j][k];
      double mag = 1.0;
      double ph = 0.0;
      bool singular = false;
      for (int i = 0; i < M; ++i) {
        const int r = m.a[i] + m.b[i] - (i == j);
        const int p = m.a[i] - m.b[i] - (i == j);
        if (r < 0 && rho[i] <= 0.0) {
          if (strict) {
            fail(ErrorKind::kNumeric,
                 fmt::format("polar_rates: rho_{} = 0 with a negative exponent in equation {}", i + 1,
                             j + 1));
          }
          singular = true;
        }
        mag *= r == 0 ? 1.0 : std::pow(rho[i], r);
        ph += p * theta[i];
      }
      if (!singular) g[j] += model.N[j][k] * std::polar(mag, ph);
    }
  }
  return g;
}

}  // namespace

CVec polar_rates(const NormalFormModel& model, const Vec& rho, const Vec& theta) {
  require(rho.size() == model.modes() && theta.size() == model.modes(),
          "polar_rates: dimension mismatch");
  return polar_terms(model, rho, theta, true);
}

PolarRhs polar_rhs(const NormalFormModel& model, const Vec& rho, const Vec& theta) {
  const int M = model.modes();
  require(rho.size() == M && theta.size() == M, "polar_rhs: dimension mismatch");
  for (int i = 0; i < M; ++i) require(rho[i] >= 0.0, "polar_rhs: amplitudes must be non-negative");
  PolarRhs out{Vec::Zero(M), Vec::Zero(M)};
  if ((rho.array() > 0.0).all()) {
    const CVec g = polar_rates(model, rho, theta);
    out.rho_dot = rho.cwiseProduct(g.real());
    out.theta_dot = g.imag();
    return out;
  }
  const CVec zdot = nf_rhs(model, to_cartesian(rho, theta));
  // Phase rate at zero amplitude: finite terms only.
  const CVec regular = polar_terms(model, rho, theta, false);
  for (int j = 0; j < M; ++j) {
    const cplx rot = zdot[j] * std::polar(1.0, -theta[j]);
    out.rho_dot[j] = rot.real();
    out.theta_dot[j] = rho[j] > 0.0 ? rot.imag() / rho[j] : regular[j].imag();
  }
  return out;
}

CVec to_cartesian(const Vec& rho, const Vec& theta) {
  CVec z(rho.size());
  for (Eigen::Index i = 0; i < rho.size(); ++i) z[i] = std::polar(rho[i], theta[i]);
  return z;
}

void to_polar(const CVec& z, Vec& rho, Vec& theta) {
  rho.resize(z.size());
  theta.resize(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    rho[i] = std::abs(z[i]);
    theta[i] = std::arg(z[i]);
  }
}

CVec xi_from_y(const Vec& y) {
  require(y.size() % 2 == 0, "xi_from_y: reduced dimension must be even");
  CVec xi(y.size() / 2);
  for (Eigen::Index j = 0; j < xi.size(); ++j) xi[j] = 0.5 * cplx(y[2 * j], -y[2 * j + 1]);
  return xi;
}

Vec y_from_xi(const CVec& xi) {
  Vec y(2 * xi.size());
  for (Eigen::Index j = 0; j < xi.size(); ++j) {
    y[2 * j] = 2.0 * xi[j].real();
    y[2 * j + 1] = -2.0 * xi[j].imag();
  }
  return y;
}

CVec inverse_transform(const NormalFormModel& model, const CVec& xi) {
  require(xi.size() == model.modes(), "inverse_transform: dimension mismatch");
  if (model.h_terms.empty()) return xi;
  const Powers pw(xi, detail::max_order(model.h_terms));
  return xi + detail::evaluate(model.h_terms, model.H, pw);
}

CVec transform(const NormalFormModel& model, const CVec& z, const CVec* guess) {
  require(z.size() == model.modes(), "transform: dimension mismatch");
  bool nonlinear = false;
  for (const auto& eq : model.h_terms) nonlinear = nonlinear || !eq.empty();
  if (!nonlinear) return z;
  const int M = model.modes();
  const int order = detail::max_order(model.h_terms);
  CVec xi = guess ? *guess : z;
  const double scale = std::max(z.norm(), 1e-300);
  auto resid = [&](const CVec& x) {
    const Powers pw(x, order);
    return CVec(x + detail::evaluate(model.h_terms, model.H, pw) - z);
  };
  CVec r = resid(xi);
  for (int it = 0; it < 60; ++it) {
    if (r.norm() <= 1e-14 * scale) return xi;
    const Powers pw(xi, order);
    CMat P, Q;
    detail::wirtinger(model.h_terms, model.H, pw, P, Q);
    P += CMat::Identity(M, M);
    const Mat J = detail::real_jacobian(P, Q);
    Vec rr(2 * M);
    rr << r.real(), r.imag();
    const Vec d = J.fullPivLu().solve(rr);
    // Backtracking on |r| keeps the iteration inside the basin of the root.
    double step = 1.0;
    CVec trial;
    CVec rt;
    for (int ls = 0; ls < 30; ++ls, step *= 0.5) {
      trial = xi;
      for (int i = 0; i < M; ++i) trial[i] -= step * cplx(d[i], d[M + i]);
      rt = resid(trial);
      if (trial.allFinite() && rt.norm() < r.norm()) break;
    }
    if (!(rt.norm() < r.norm())) break;
    xi = trial;
    r = rt;
    if (step == 1.0 && d.norm() <= 1e-15 * std::max(1.0, xi.norm())) return xi;
  }
  if (!xi.allFinite() || r.norm() > 1e-8 * scale) {
    fail(ErrorKind::kSolver,
         fmt::format("transform: Newton inversion failed (|z| = {:.3e}, residual {:.3e})", scale,
                     r.norm()));
  }
  return xi;
}

RomTrajectory simulate_rom(const NormalFormModel& model, const CVec& z0,
                           std::span<const double> times, double rel_tol) {
  namespace odeint = boost::numeric::odeint;
  using State = std::vector<double>;
  const int M = model.modes();
  require(z0.size() == M, "simulate_rom: initial state dimension mismatch");
  require(z0.allFinite(), "simulate_rom: non-finite initial state");
  require(times.size() >= 1, "simulate_rom: no output times");
  for (std::size_t k = 1; k < times.size(); ++k) {
    require(times[k] > times[k - 1], "simulate_rom: output times must increase");
  }
  State x(2 * M);
  for (int i = 0; i < M; ++i) {
    x[i] = z0[i].real();
    x[M + i] = z0[i].imag();
  }
  // Trajectories leaving this radius are reported as divergent instead of
  // being followed with ever smaller steps.
  double bound = z0.norm();
  if (model.amplitude_max.size() == M) bound = std::max(bound, model.amplitude_max.norm());
  bound = 1e3 * std::max(bound, 1e-300);
  auto rhs = [&](const State& s, State& ds, double t) {
    CVec z(M);
    for (int i = 0; i < M; ++i) z[i] = cplx(s[i], s[M + i]);
    if (!(z.norm() <= bound)) {
      fail(ErrorKind::kNumeric, fmt::format("simulate_rom: trajectory diverged at t = {:.6g}", t));
    }
    const CVec zd = nf_rhs(model, z);
    for (int i = 0; i < M; ++i) {
      ds[i] = zd[i].real();
      ds[M + i] = zd[i].imag();
    }
  };
  RomTrajectory out;
  out.times.assign(times.begin(), times.end());
  out.z.resize(M, static_cast<Eigen::Index>(times.size()));
  Eigen::Index col = 0;
  auto observe = [&](const State& s, double) {
    for (int i = 0; i < M; ++i) out.z(i, col) = cplx(s[i], s[M + i]);
    ++col;
  };
  const double abs_tol = rel_tol * std::max(z0.norm(), 1e-300);
  double w = 0.0;
  for (int j = 0; j < M; ++j) w = std::max(w, std::abs(model.linear(j)));
  const double dt0 = w > 0.0 ? 0.01 / w : 1e-4;
  auto stepper = odeint::make_dense_output(abs_tol, rel_tol, odeint::runge_kutta_dopri5<State>());
  try {
    odeint::integrate_times(stepper, rhs, x, times.begin(), times.end(), dt0, observe,
                            odeint::max_step_checker(2000));
  } catch (const odeint::step_adjustment_error& e) {
    fail(ErrorKind::kSolver, std::string("simulate_rom: ") + e.what());
  } catch (const odeint::no_progress_error& e) {
    fail(ErrorKind::kSolver, std::string("simulate_rom: ") + e.what());
  }
  return out;
}

DampingFrequency instantaneous_damping_frequency(const NormalFormModel& model, const Vec& rho,
                                                 const Vec& theta) {
  require(rho.size() == model.modes() && theta.size() == model.modes(),
          "instantaneous_damping_frequency: dimension mismatch");
  const CVec g = polar_terms(model, rho, theta, false);
  DampingFrequency out{Vec(g.size()), Vec(g.size())};
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    const double a = g[j].real();
    const double w = g[j].imag();
    const double den = std::hypot(a, w);
    out.zeta[j] = den > 0.0 ? -a / den : 0.0;
    out.omega[j] = w;
  }
  return out;
}

namespace {

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string t;
  while (ss >> t) out.push_back(t);
  return out;
}

int parse_int(const std::string& s, const std::string& where) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty()) fail(ErrorKind::kParse, where + ": expected an integer, got '" + s + "'");
  return v;
}

double parse_double(const std::string& s, const std::string& where) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty()) fail(ErrorKind::kParse, where + ": expected a number, got '" + s + "'");
  return v;
}

}  // namespace

NormalFormModel load_rom_coefficients(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot read " + path);
  std::string line;
  int lineno = 0;
  int m = -1;
  int f = -1;
  NormalFormModel model;
  std::vector<std::map<std::pair<std::vector<int>, std::vector<int>>, bool>> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = fmt::format("{}:{}", path, lineno);
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto tok = tokens(line);
    if (tok.empty()) continue;
    if (m < 0) {
      char conv[64] = {0};
      if (std::sscanf(line.c_str(), " m=%d f=%d convention=%63s", &m, &f, conv) != 3 ||
          std::string(conv) != "polar-extended" || m < 2 || m % 2 != 0 || f < 1) {
        fail(ErrorKind::kParse, where + ": expected header 'm=<even int> f=<int> convention=polar-extended'");
      }
      const int M = m / 2;
      model.tmpl.modes = M;
      model.tmpl.order = f;
      model.tmpl.terms.resize(M);
      model.tmpl.phases.resize(M);
      model.N.resize(M);
      model.h_terms.resize(M);
      model.H.resize(M);
      seen.resize(M);
      continue;
    }
    const int M = m / 2;
    if (tok[0] == "envelope" || tok[0] == "scale") {
      if (static_cast<int>(tok.size()) != M + 1) fail(ErrorKind::kParse, where + ": expected " + std::to_string(M) + " values");
      Vec v(M);
      for (int i = 0; i < M; ++i) v[i] = parse_double(tok[1 + i], where);
      (tok[0] == "envelope" ? model.amplitude_max : model.xi_scale) = v;
      continue;
    }
    if (tok[0] == "transform") {
      if (static_cast<int>(tok.size()) != 2 * M + 4) {
        fail(ErrorKind::kParse, where + ": transform record needs eq, " + std::to_string(2 * M) + " exponents, Re, Im");
      }
      const int eq = parse_int(tok[1], where) - 1;
      if (eq < 0 || eq >= M) fail(ErrorKind::kParse, where + ": equation index out of range");
      Monomial mono;
      for (int i = 0; i < M; ++i) mono.a.push_back(parse_int(tok[2 + i], where));
      for (int i = 0; i < M; ++i) mono.b.push_back(parse_int(tok[2 + M + i], where));
      for (int i = 0; i < M; ++i) {
        if (mono.a[i] < 0 || mono.b[i] < 0) fail(ErrorKind::kParse, where + ": negative transform exponent");
      }
      if (mono.order() < 2) fail(ErrorKind::kParse, where + ": transform terms start at order 2");
      model.h_terms[eq].push_back(mono);
      model.H[eq].push_back(cplx(parse_double(tok[2 + 2 * M], where), parse_double(tok[3 + 2 * M], where)));
      continue;
    }
    if (static_cast<int>(tok.size()) != 2 * M + 3) {
      fail(ErrorKind::kParse, fmt::format("{}: malformed record, expected {} fields (equation, {} rho "
                                          "exponents, {} phase integers, Re, Im)",
                                          where, 2 * M + 3, M, M));
    }
    const int eq = parse_int(tok[0], where) - 1;
    if (eq < 0 || eq >= M) fail(ErrorKind::kParse, where + ": equation index out of range");
    std::vector<int> r(M), p(M);
    for (int i = 0; i < M; ++i) r[i] = parse_int(tok[1 + i], where);
    for (int i = 0; i < M; ++i) p[i] = parse_int(tok[1 + M + i], where);
    Monomial mono;
    mono.a.resize(M);
    mono.b.resize(M);
    for (int i = 0; i < M; ++i) {
      const int num_a = r[i] + p[i] + 2 * (i == eq);
      const int num_b = r[i] - p[i];
      if (num_a % 2 != 0 || num_b % 2 != 0 || num_a < 0 || num_b < 0) {
        fail(ErrorKind::kParse, where + ": exponent tuple does not correspond to a polynomial term");
      }
      mono.a[i] = num_a / 2;
      mono.b[i] = num_b / 2;
    }
    if (mono.order() > f) fail(ErrorKind::kParse, where + ": term order exceeds declared f");
    if (seen[eq].count({mono.a, mono.b})) fail(ErrorKind::kParse, where + ": duplicate term");
    seen[eq][{mono.a, mono.b}] = true;
    model.tmpl.terms[eq].push_back(mono);
    model.N[eq].push_back(cplx(parse_double(tok[1 + 2 * M], where), parse_double(tok[2 + 2 * M], where)));
  }
  if (m < 0) fail(ErrorKind::kParse, path + ": missing header");
  const int M = m / 2;
  for (int j = 0; j < M; ++j) {
    const Monomial u = unit(M, j);
    auto it = std::find(model.tmpl.terms[j].begin(), model.tmpl.terms[j].end(), u);
    if (it == model.tmpl.terms[j].end()) {
      fail(ErrorKind::kParse, fmt::format("{}: equation {} has no linear term", path, j + 1));
    }
    const auto k = it - model.tmpl.terms[j].begin();
    std::rotate(model.tmpl.terms[j].begin(), it, it + 1);
    std::rotate(model.N[j].begin(), model.N[j].begin() + k, model.N[j].begin() + k + 1);
    for (const auto& mono : model.tmpl.terms[j]) {
      const auto ph = phase_of(mono);
      if (!model.tmpl.resonant(j, ph)) model.tmpl.phases[j].push_back(ph);
    }
  }
  model.provenance = "file:" + path;
  return model;
}

void write_rom_coefficients(const NormalFormModel& model, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) fail(ErrorKind::kIo, "cannot write " + path);
  const int M = model.modes();
  fmt::print(f, "m={} f={} convention=polar-extended\n", 2 * M, model.tmpl.order);
  fmt::print(f, "# eq rho-exponents phase Re Im\n");
  for (int j = 0; j < M; ++j) {
    for (std::size_t k = 0; k < model.tmpl.terms[j].size(); ++k) {
      const Monomial& mono = model.tmpl.terms[j][k];
      fmt::print(f, "{}", j + 1);
      for (int i = 0; i < M; ++i) fmt::print(f, " {}", mono.a[i] + mono.b[i] - (i == j));
      for (int i = 0; i < M; ++i) fmt::print(f, " {}", mono.a[i] - mono.b[i] - (i == j));
      fmt::print(f, " {:.17g} {:.17g}\n", model.N[j][k].real(), model.N[j][k].imag());
    }
  }
  for (int j = 0; j < M && !model.h_terms.empty(); ++j) {
    for (std::size_t k = 0; k < model.h_terms[j].size(); ++k) {
      const Monomial& mono = model.h_terms[j][k];
      fmt::print(f, "transform {}", j + 1);
      for (int i = 0; i < M; ++i) fmt::print(f, " {}", mono.a[i]);
      for (int i = 0; i < M; ++i) fmt::print(f, " {}", mono.b[i]);
      fmt::print(f, " {:.17g} {:.17g}\n", model.H[j][k].real(), model.H[j][k].imag());
    }
  }
  auto print_vec = [&](const char* tag, const Vec& v) {
    if (v.size() != M) return;
    fmt::print(f, "{}", tag);
    for (int i = 0; i < M; ++i) fmt::print(f, " {:.17g}", v[i]);
    fmt::print(f, "\n");
  };
  print_vec("envelope", model.amplitude_max);
  print_vec("scale", model.xi_scale);
  std::fclose(f);
}

}  // namespace ssm::normalform
