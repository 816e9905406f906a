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

// Coefficient fit: minimize sum_k |D t^-1(xi_k) xi_dot_k - n(t^-1(xi_k))|^2
// over the resonant coefficients of n and the non-resonant coefficients of
// t^-1. Data are normalized per mode by the training max |xi_j| and the
// coefficients are mapped back afterwards.

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "normalform/normalform.hpp"
#include "normalform/poly.hpp"

namespace ssm::normalform {

namespace {

using detail::Powers;

struct Sample {
  CVec xi;
  CVec xidot;
  double amplitude;  // max_j |xi_j| in normalized units
};

struct Problem {
  int M = 0;
  const NormalFormTemplate* tmpl = nullptr;
  std::vector<std::vector<Monomial>> hterms;
  int h_order = 2;
  std::vector<int> n_off;  // first real parameter of each equation's N block
  std::vector<int> h_off;
  int n_params = 0;
  int total = 0;
  Vec reg;  // 1 for coefficients under the ridge penalty (all but linear)
  std::vector<Sample> samples;
};

void unpack(const Problem& pr, const Vec& p, std::vector<std::vector<cplx>>& N,
            std::vector<std::vector<cplx>>& H) {
  N.resize(pr.M);
  H.resize(pr.M);
  for (int j = 0; j < pr.M; ++j) {
    N[j].resize(pr.tmpl->terms[j].size());
    for (std::size_t k = 0; k < N[j].size(); ++k) N[j][k] = cplx(p[pr.n_off[j] + 2 * k], p[pr.n_off[j] + 2 * k + 1]);
    H[j].resize(pr.hterms[j].size());
    for (std::size_t k = 0; k < H[j].size(); ++k) H[j][k] = cplx(p[pr.h_off[j] + 2 * k], p[pr.h_off[j] + 2 * k + 1]);
  }
}

// z = t^-1(xi), z_dot = D t^-1(xi) xi_dot, plus the transform monomials and
// their time derivatives when requested.
void lift(const Problem& pr, const std::vector<std::vector<cplx>>& H, const Sample& s, CVec& z,
          CVec& zdot, std::vector<std::vector<cplx>>* hv, std::vector<std::vector<cplx>>* hd) {
  const Powers px(s.xi, pr.h_order);
  z = s.xi;
  zdot = s.xidot;
  if (hv) {
    hv->resize(pr.M);
    hd->resize(pr.M);
  }
  for (int j = 0; j < pr.M; ++j) {
    if (hv) {
      (*hv)[j].resize(pr.hterms[j].size());
      (*hd)[j].resize(pr.hterms[j].size());
    }
    for (std::size_t k = 0; k < pr.hterms[j].size(); ++k) {
      const Monomial& m = pr.hterms[j][k];
      const cplx v = px.monomial(m);
      cplx dv = 0.0;
      for (int i = 0; i < pr.M; ++i) {
        dv += px.d_dz(m, i) * s.xidot[i] + px.d_dzbar(m, i) * std::conj(s.xidot[i]);
      }
      z[j] += H[j][k] * v;
      zdot[j] += H[j][k] * dv;
      if (hv) {
        (*hv)[j][k] = v;
        (*hd)[j][k] = dv;
      }
    }
  }
}

// Residual of one sample; J (2M x total) filled when non-null. Rows are
// [Re R_1..Re R_M, Im R_1..Im R_M].
CVec residual(const Problem& pr, const std::vector<std::vector<cplx>>& N,
              const std::vector<std::vector<cplx>>& H, const Sample& s,
              Eigen::Ref<Mat> J, bool with_jac) {
  CVec z, zdot;
  std::vector<std::vector<cplx>> hv, hd;
  lift(pr, H, s, z, zdot, with_jac ? &hv : nullptr, with_jac ? &hd : nullptr);
  const Powers pz(z, pr.tmpl->order);
  const CVec R = zdot - detail::evaluate(pr.tmpl->terms, N, pz);
  if (!with_jac) return R;
  const int M = pr.M;
  J.setZero();
  for (int j = 0; j < M; ++j) {
    for (std::size_t k = 0; k < pr.tmpl->terms[j].size(); ++k) {
      const cplx mono = pz.monomial(pr.tmpl->terms[j][k]);
      const int c = pr.n_off[j] + 2 * static_cast<int>(k);
      J(j, c) = -mono.real();
      J(M + j, c) = -mono.imag();
      J(j, c + 1) = mono.imag();
      J(M + j, c + 1) = -mono.real();
    }
  }
  CMat Pn, Qn;
  detail::wirtinger(pr.tmpl->terms, N, pz, Pn, Qn);
  for (int i = 0; i < M; ++i) {
    for (std::size_t k = 0; k < pr.hterms[i].size(); ++k) {
      const int c = pr.h_off[i] + 2 * static_cast<int>(k);
      const cplx v = hv[i][k];
      for (int j = 0; j < M; ++j) {
        const cplx P = (i == j ? hd[i][k] : cplx(0.0)) - Pn(j, i) * v;
        const cplx Q = -Qn(j, i) * std::conj(v);
        const cplx dre = P + Q;
        const cplx dim = cplx(0.0, 1.0) * (P - Q);
        J(j, c) = dre.real();
        J(M + j, c) = dre.imag();
        J(j, c + 1) = dim.real();
        J(M + j, c + 1) = dim.imag();
      }
    }
  }
  return R;
}

double objective(const Problem& pr, const Vec& p, double ridge_abs) {
  std::vector<std::vector<cplx>> N, H;
  unpack(pr, p, N, H);
  Mat dummy(1, 1);
  double f = 0.0;
  for (const auto& s : pr.samples) f += residual(pr, N, H, s, dummy, false).squaredNorm();
  return f + ridge_abs * p.cwiseProduct(pr.reg).squaredNorm();
}

// Gauss-Newton normal equations A = J^T J, g = J^T r, accumulated in blocks.
double normal_equations(const Problem& pr, const Vec& p, Mat& A, Vec& g) {
  std::vector<std::vector<cplx>> N, H;
  unpack(pr, p, N, H);
  const int M = pr.M;
  const int P = pr.total;
  constexpr int kBlock = 96;
  A = Mat::Zero(P, P);
  g = Vec::Zero(P);
  Mat Jb(2 * M * kBlock, P);
  Vec rb(2 * M * kBlock);
  double f = 0.0;
  const auto S = static_cast<int>(pr.samples.size());
  for (int b0 = 0; b0 < S; b0 += kBlock) {
    const int cnt = std::min(kBlock, S - b0);
    for (int q = 0; q < cnt; ++q) {
      auto rows = Jb.middleRows(2 * M * q, 2 * M);
      const CVec R = residual(pr, N, H, pr.samples[b0 + q], rows, true);
      rb.segment(2 * M * q, M) = R.real();
      rb.segment(2 * M * q + M, M) = R.imag();
      f += R.squaredNorm();
    }
    const auto Jv = Jb.topRows(2 * M * cnt);
    A.selfadjointView<Eigen::Lower>().rankUpdate(Jv.transpose());
    g.noalias() += Jv.transpose() * rb.head(2 * M * cnt);
  }
  A = A.selfadjointView<Eigen::Lower>();
  return f;
}

// Ridge-regularized linear least squares for N with h fixed, one equation
// at a time.
void n_step(const Problem& pr, Vec& p, double ridge_abs) {
  std::vector<std::vector<cplx>> N, H;
  unpack(pr, p, N, H);
  const int M = pr.M;
  std::vector<CMat> G(M);
  std::vector<CVec> b(M);
  for (int j = 0; j < M; ++j) {
    const auto T = static_cast<Eigen::Index>(pr.tmpl->terms[j].size());
    G[j] = CMat::Zero(T, T);
    b[j] = CVec::Zero(T);
  }
  for (const auto& s : pr.samples) {
    CVec z, zdot;
    lift(pr, H, s, z, zdot, nullptr, nullptr);
    const Powers pz(z, pr.tmpl->order);
    for (int j = 0; j < M; ++j) {
      const auto T = static_cast<Eigen::Index>(pr.tmpl->terms[j].size());
      CVec mono(T);
      for (Eigen::Index k = 0; k < T; ++k) mono[k] = pz.monomial(pr.tmpl->terms[j][k]);
      G[j].noalias() += mono.conjugate() * mono.transpose();
      b[j].noalias() += mono.conjugate() * zdot[j];
    }
  }
  for (int j = 0; j < M; ++j) {
    const auto T = G[j].rows();
    const double tr = G[j].real().trace() / static_cast<double>(T);
    G[j] += CMat::Identity(T, T) * (1e-14 * tr);
    for (Eigen::Index k = 1; k < T; ++k) G[j](k, k) += ridge_abs;
    const CVec sol = G[j].ldlt().solve(b[j]);
    for (Eigen::Index k = 0; k < T; ++k) {
      p[pr.n_off[j] + 2 * k] = sol[k].real();
      p[pr.n_off[j] + 2 * k + 1] = sol[k].imag();
    }
  }
}

// One damped Gauss-Newton step on the parameters in [lo, hi); returns the
// new objective, or +inf when no decrease was found.
double lm_step(const Problem& pr, Vec& p, const Mat& A, const Vec& g, int lo, int hi, double& mu,
               double ridge_abs, double f0) {
  const int n = hi - lo;
  Mat Ab = A.block(lo, lo, n, n);
  Vec gb = g.segment(lo, n);
  for (int c = 0; c < n; ++c) {
    Ab(c, c) += ridge_abs * pr.reg[lo + c];
    gb[c] += ridge_abs * pr.reg[lo + c] * p[lo + c];
  }
  Vec d = Ab.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  const Mat As = d.asDiagonal() * Ab * d.asDiagonal();
  const Vec gs = d.asDiagonal() * gb;
  for (int attempt = 0; attempt < 14; ++attempt) {
    Mat K = As;
    K.diagonal().array() += mu;
    Eigen::LLT<Mat> llt(K);
    if (llt.info() == Eigen::Success) {
      const Vec step = d.asDiagonal() * llt.solve(-gs);
      Vec trial = p;
      trial.segment(lo, n) += step;
      const double f = objective(pr, trial, ridge_abs);
      if (std::isfinite(f) && f < f0) {
        p = trial;
        mu = std::max(mu / 3.0, 1e-15);
        return f;
      }
    }
    mu *= 4.0;
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace

NormalFormModel fit_normal_form(std::span<const geometry::ReducedTrajectory> data,
                                const NormalFormTemplate& tmpl, const FitOptions& opts,
                                FitReport* report) {
  const int M = tmpl.modes;
  require(M >= 1 && !tmpl.terms.empty(), "fit_normal_form: empty template");
  require(!data.empty(), "fit_normal_form: no data");
  require(opts.stride >= 1, "fit_normal_form: stride must be >= 1");
  const int h_order = opts.transform_order < 0 ? tmpl.order : opts.transform_order;

  // Samples in xi coordinates.
  std::vector<Sample> raw;
  for (const auto& tr : data) {
    require(tr.y.rows() == 2 * M, "fit_normal_form: reduced dimension does not match template");
    require(tr.ydot.rows() == tr.y.rows() && tr.ydot.cols() == tr.y.cols(),
            "fit_normal_form: derivatives missing; call estimate_derivatives first");
    for (Eigen::Index k = 0; k < tr.y.cols(); k += opts.stride) {
      raw.push_back({xi_from_y(tr.y.col(k)), xi_from_y(tr.ydot.col(k)), 0.0});
    }
  }
  Vec scale = Vec::Zero(M);
  for (const auto& s : raw) scale = scale.cwiseMax(s.xi.cwiseAbs());
  for (int j = 0; j < M; ++j) {
    if (!(scale[j] > 0.0)) fail(ErrorKind::kNumeric, fmt::format("fit_normal_form: mode {} carries no data", j + 1));
  }

  Problem pr;
  pr.M = M;
  pr.tmpl = &tmpl;
  pr.h_order = std::max(h_order, 2);
  pr.hterms.resize(M);
  if (h_order >= 2) {
    const geometry::MonomialBasis basis(2 * M, 2, h_order);
    for (int j = 0; j < M; ++j) {
      for (const auto& e : basis.exponents) {
        Monomial m;
        m.a.assign(e.begin(), e.begin() + M);
        m.b.assign(e.begin() + M, e.end());
        std::vector<int> k(M);
        for (int i = 0; i < M; ++i) k[i] = m.a[i] - m.b[i];
        if (!tmpl.resonant(j, k)) pr.hterms[j].push_back(std::move(m));
      }
    }
  }
  int off = 0;
  for (int j = 0; j < M; ++j) {
    pr.n_off.push_back(off);
    off += 2 * static_cast<int>(tmpl.terms[j].size());
  }
  pr.n_params = off;
  for (int j = 0; j < M; ++j) {
    pr.h_off.push_back(off);
    off += 2 * static_cast<int>(pr.hterms[j].size());
  }
  pr.total = off;
  const auto needed = static_cast<std::size_t>(pr.total);
  if (2 * M * raw.size() < 2 * needed) {
    fail(ErrorKind::kInvalidArgument,
         fmt::format("fit_normal_form: {} samples cannot determine {} real coefficients", raw.size(), pr.total));
  }
  for (auto& s : raw) {
    s.xi = s.xi.cwiseQuotient(scale.cast<cplx>());
    s.xidot = s.xidot.cwiseQuotient(scale.cast<cplx>());
    s.amplitude = s.xi.cwiseAbs().maxCoeff();
  }
  pr.samples = std::move(raw);

  pr.reg = Vec::Ones(pr.total);
  for (int j = 0; j < M; ++j) pr.reg.segment(pr.n_off[j], 2).setZero();

  Vec p = Vec::Zero(pr.total);
  Mat A;
  Vec g;
  normal_equations(pr, p, A, g);
  // The penalty is relative to the mean curvature of the regularized block.
  const double ridge_abs = opts.ridge * A.diagonal().dot(pr.reg) / pr.reg.sum();
  n_step(pr, p, ridge_abs);
  double f = normal_equations(pr, p, A, g) + ridge_abs * p.cwiseProduct(pr.reg).squaredNorm();
  double mu = 1e-3;
  int iterations = 0;
  // Alternating sweeps: Gauss-Newton in h with n fixed, then exact n.
  for (int sweep = 0; sweep < opts.als_sweeps && pr.total > pr.n_params; ++sweep) {
    double mu_h = 1e-3;
    Vec trial = p;
    const double fh = lm_step(pr, trial, A, g, pr.n_params, pr.total, mu_h, ridge_abs, f);
    if (!std::isfinite(fh)) break;
    n_step(pr, trial, ridge_abs);
    const double fn = objective(pr, trial, ridge_abs);
    if (!(fn < f)) break;
    p = trial;
    f = normal_equations(pr, p, A, g) + ridge_abs * p.cwiseProduct(pr.reg).squaredNorm();
    ++iterations;
  }
  // Joint damped Gauss-Newton.
  const double f_start = f;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const double fn = lm_step(pr, p, A, g, 0, pr.total, mu, ridge_abs, f);
    ++iterations;
    if (!std::isfinite(fn)) break;
    const double decrease = f - fn;
    f = fn;
    if (decrease <= opts.tolerance * fn || f <= 1e-28 * f_start) break;
    f = normal_equations(pr, p, A, g) + ridge_abs * p.cwiseProduct(pr.reg).squaredNorm();
  }

  NormalFormModel model;
  model.tmpl = tmpl;
  model.h_terms = pr.hterms;
  unpack(pr, p, model.N, model.H);
  // Residual breakdown in normalized units before unscaling.
  std::vector<double> band_res(5, 0.0), band_ref(5, 0.0);
  {
    Mat dummy(1, 1);
    for (const auto& s : pr.samples) {
      const double r2 = residual(pr, model.N, model.H, s, dummy, false).squaredNorm();
      const int b = std::min(4, static_cast<int>(s.amplitude * 5.0));
      band_res[b] += r2;
      band_ref[b] += s.xidot.squaredNorm();
    }
  }
  auto unscale = [&](const std::vector<std::vector<Monomial>>& terms, std::vector<std::vector<cplx>>& c) {
    for (int j = 0; j < M; ++j) {
      for (std::size_t k = 0; k < terms[j].size(); ++k) {
        double s = scale[j];
        for (int i = 0; i < M; ++i) s /= std::pow(scale[i], terms[j][k].a[i] + terms[j][k].b[i]);
        c[j][k] *= s;
      }
    }
  };
  unscale(model.tmpl.terms, model.N);
  unscale(model.h_terms, model.H);
  model.xi_scale = scale;
  model.amplitude_max = Vec::Zero(M);
  for (const auto& s : pr.samples) {
    const CVec z = inverse_transform(model, s.xi.cwiseProduct(scale.cast<cplx>()));
    model.amplitude_max = model.amplitude_max.cwiseMax(z.cwiseAbs());
  }
  model.provenance = fmt::format("fit f={} transform={} samples={} derivatives={}", tmpl.order,
                                 h_order, pr.samples.size(),
                                 data.front().derivative_method.empty() ? "given" : data.front().derivative_method);

  if (report) {
    FitReport& rep = *report;
    rep = FitReport{};
    rep.objective = f;
    rep.iterations = iterations;
    double ref = 0.0, res = 0.0;
    for (int b = 0; b < 5; ++b) {
      ref += band_ref[b];
      res += band_res[b];
      rep.band_upper.push_back((b + 1) / 5.0);
      rep.band_residual.push_back(band_ref[b] > 0.0 ? std::sqrt(band_res[b] / band_ref[b]) : 0.0);
    }
    rep.relative_residual = ref > 0.0 ? std::sqrt(res / ref) : 0.0;
    if (rep.relative_residual > opts.residual_warning) {
      std::string msg = fmt::format("fit_normal_form: relative residual {:.3e} above {:.3e}; by amplitude band:",
                                    rep.relative_residual, opts.residual_warning);
      for (int b = 0; b < 5; ++b) {
        msg += fmt::format(" [{:.1f},{:.1f}]={:.3e}", b / 5.0, (b + 1) / 5.0, rep.band_residual[b]);
      }
      rep.warnings.push_back(msg);
    }
    if (static_cast<int>(opts.expected_linear.size()) == M) {
      for (int j = 0; j < M; ++j) {
        const cplx l = model.linear(j);
        const double rel = std::abs(l - opts.expected_linear[j]) / std::abs(opts.expected_linear[j]);
        if (rel > 0.02) {
          rep.warnings.push_back(fmt::format(
              "fit_normal_form: linear coefficient of mode {} ({:.4f}{:+.4f}i) differs from the "
              "spectrum ({:.4f}{:+.4f}i) by {:.2f}%",
              j + 1, l.real(), l.imag(), opts.expected_linear[j].real(), opts.expected_linear[j].imag(),
              100.0 * rel));
        }
      }
    }
  }
  return model;
}

double fit_objective(const NormalFormModel& model, std::span<const geometry::ReducedTrajectory> data) {
  const int M = model.modes();
  const Vec w = model.xi_scale.size() == M ? model.xi_scale : Vec::Ones(M);
  double f = 0.0;
  const int order = std::max(2, model.h_terms.empty() ? 2 : detail::max_order(model.h_terms));
  for (const auto& tr : data) {
    for (Eigen::Index k = 0; k < tr.y.cols(); ++k) {
      const CVec xi = xi_from_y(tr.y.col(k));
      const CVec xid = xi_from_y(tr.ydot.col(k));
      const Powers px(xi, order);
      CVec z = xi, zdot = xid;
      for (int j = 0; j < M && !model.h_terms.empty(); ++j) {
        for (std::size_t q = 0; q < model.h_terms[j].size(); ++q) {
          const Monomial& m = model.h_terms[j][q];
          cplx dv = 0.0;
          for (int i = 0; i < M; ++i) dv += px.d_dz(m, i) * xid[i] + px.d_dzbar(m, i) * std::conj(xid[i]);
          z[j] += model.H[j][q] * px.monomial(m);
          zdot[j] += model.H[j][q] * dv;
        }
      }
      const CVec R = zdot - nf_rhs(model, z);
      for (int j = 0; j < M; ++j) f += std::norm(R[j] / w[j]);
    }
  }
  return f;
}

}  // namespace ssm::normalform
