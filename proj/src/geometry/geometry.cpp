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

#include "geometry/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace ssm::geometry {

long long monomial_count(int m, int degree) {
  // C(m + d - 1, d)
  long long r = 1;
  for (int i = 1; i <= degree; ++i) r = r * (m + i - 1) / i;
  return r;
}

namespace {

// Exponent tuples of total degree d in lexicographically descending order.
void degree_block(int m, int d, Exponent& cur, int pos, std::vector<Exponent>& out) {
  if (pos == m - 1) {
    cur[pos] = d;
    out.push_back(cur);
    return;
  }
  for (int e = d; e >= 0; --e) {
    cur[pos] = e;
    degree_block(m, d - e, cur, pos + 1, out);
  }
  cur[pos] = 0;
}

}  // namespace

MonomialBasis::MonomialBasis(int m_, int lo_, int hi_) : m(m_), lo(lo_), hi(hi_) {
  require(m >= 1, "monomials: need at least one variable");
  require(lo >= 1 && lo <= hi, "monomials: need 1 <= l <= r");
  for (int d = lo; d <= hi; ++d) {
    Exponent cur(m, 0);
    const std::size_t before = exponents.size();
    degree_block(m, d, cur, 0, exponents);
    counts.push_back(static_cast<int>(exponents.size() - before));
  }
}

Vec MonomialBasis::evaluate(const Vec& y) const {
  require(y.size() == m, "monomials: dimension mismatch");
  // Powers table avoids repeated pow calls.
  Mat pw(m, hi + 1);
  for (int i = 0; i < m; ++i) {
    pw(i, 0) = 1.0;
    for (int e = 1; e <= hi; ++e) pw(i, e) = pw(i, e - 1) * y[i];
  }
  Vec out(size());
  for (int k = 0; k < size(); ++k) {
    double v = 1.0;
    for (int i = 0; i < m; ++i) v *= pw(i, exponents[k][i]);
    out[k] = v;
  }
  return out;
}

Mat MonomialBasis::evaluate(const Mat& Y) const {
  Mat out(size(), Y.cols());
  for (Eigen::Index c = 0; c < Y.cols(); ++c) out.col(c) = evaluate(Vec(Y.col(c)));
  return out;
}

Vec monomials(const Vec& y, int lo, int hi) {
  return MonomialBasis(static_cast<int>(y.size()), lo, hi).evaluate(y);
}

ReducedTrajectory project(const spectral::SpectralSubspace& subspace, const Trajectory& traj) {
  require(traj.state_dim() == subspace.V.rows(), "project: state dimension does not match basis");
  ReducedTrajectory r;
  r.times = traj.times;
  r.y = subspace.pseudo_inverse * traj.snapshots;
  return r;
}

Mat ManifoldParam::full_coefficients() const {
  if (basis.lo == 1) return W;
  Mat F(V.rows(), V.cols() + W.cols());
  F << V, W;
  return F;
}

ManifoldParam fit_geometry(std::span<const Trajectory> trajectories,
                           const spectral::SpectralSubspace& subspace, int p,
                           const GeometryOptions& opts) {
  require(p >= 1, "fit_geometry: order must be >= 1");
  require(!trajectories.empty(), "fit_geometry: no trajectories");
  const Eigen::Index N2 = subspace.V.rows();
  const int m = subspace.dim();
  Eigen::Index total = 0;
  for (const auto& t : trajectories) {
    require(t.state_dim() == N2, "fit_geometry: trajectory dimension does not match basis");
    total += t.samples();
  }
  Mat X(N2, total);
  {
    Eigen::Index c = 0;
    for (const auto& t : trajectories) {
      X.middleCols(c, t.samples()) = t.snapshots;
      c += t.samples();
    }
  }
  const Mat Y = subspace.pseudo_inverse * X;

  ManifoldParam out;
  out.n = static_cast<int>(N2 / 2);
  out.m = m;
  out.p = p;
  out.V = subspace.V;
  out.y_max = Y.cwiseAbs().rowwise().maxCoeff();

  const bool constrained = opts.constrain_tangent;
  if (constrained && p == 1) {
    out.basis = MonomialBasis();
    out.basis.m = m;
    out.basis.lo = 2;
    out.basis.hi = 1;
    out.W = Mat::Zero(N2, 0);
    const Mat R = X - out.V * Y;
    out.residual = X.norm() > 0 ? R.norm() / X.norm() : 0.0;
    out.rank = 0;
    out.condition = 1.0;
    return out;
  }
  out.basis = MonomialBasis(m, constrained ? 2 : 1, p);
  const int D = out.basis.size();
  if (total < 3LL * D) {
    fail(ErrorKind::kInvalidArgument,
         fmt::format("fit_geometry: {} snapshots for {} coefficients per row; need at least {}",
                     total, D, 3LL * D));
  }

  Vec scale = Vec::Ones(m);
  if (opts.scale_data) {
    for (int i = 0; i < m; ++i) {
      if (out.y_max[i] > 0.0) scale[i] = out.y_max[i];
    }
  }
  const Mat Ys = scale.cwiseInverse().asDiagonal() * Y;
  const Mat Phi = out.basis.evaluate(Ys);  // D x N
  const Mat R = constrained ? Mat(X - out.V * Y) : X;

  // Least squares R ~ W Phi via QR of Phi^T followed by SVD of the
  // triangular factor.
  Eigen::HouseholderQR<Mat> qr(Phi.transpose());
  const Mat Rt = qr.matrixQR().topRows(D).triangularView<Eigen::Upper>();
  const Mat QtB = (qr.householderQ().transpose() * R.transpose()).topRows(D);
  Eigen::JacobiSVD<Mat> svd(Rt, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec s = svd.singularValues();
  const double smax = s.size() ? s[0] : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > opts.svd_tolerance * smax) ++rank;
  }
  out.rank = rank;
  out.condition = (s.size() && s[s.size() - 1] > 0.0) ? smax / s[s.size() - 1]
                                                      : std::numeric_limits<double>::infinity();
  Vec sinv = Vec::Zero(s.size());
  for (int i = 0; i < rank; ++i) sinv[i] = 1.0 / s[i];
  const Mat Ws_t = svd.matrixV() * sinv.asDiagonal() * svd.matrixU().transpose() * QtB;  // D x 2n
  Mat W = Ws_t.transpose();
  for (int k = 0; k < D; ++k) {
    double f = 1.0;
    for (int i = 0; i < m; ++i) f *= std::pow(scale[i], out.basis.exponents[k][i]);
    W.col(k) /= f;
  }
  if (constrained && opts.project_complement) W -= out.V * (subspace.pseudo_inverse * W);
  out.W = W;

  const Mat Xr = out.V * Y * (constrained ? 1.0 : 0.0) + W * out.basis.evaluate(Y);
  out.residual = X.norm() > 0 ? (X - Xr).norm() / X.norm() : 0.0;
  if (out.condition > opts.condition_warning) {
    out.warnings.push_back(fmt::format(
        "fit_geometry: regression ill-conditioned (condition {:.3e}, rank {} of {}); "
        "relative training residual {:.3e}",
        out.condition, rank, D, out.residual));
  }
  if (rank < D && out.condition <= opts.condition_warning) {
    out.warnings.push_back(fmt::format("fit_geometry: {} of {} directions truncated", D - rank, D));
  }
  return out;
}

Vec reconstruct(const ManifoldParam& param, const Vec& y) {
  require(y.size() == param.m, "reconstruct: reduced dimension mismatch");
  Vec x = Vec::Zero(param.V.rows());
  if (param.basis.lo != 1) x = param.V * y;
  if (param.W.cols() > 0) x += param.W * param.basis.evaluate(y);
  return x;
}

Mat reconstruct(const ManifoldParam& param, const Mat& Y) {
  Mat X(param.V.rows(), Y.cols());
  for (Eigen::Index c = 0; c < Y.cols(); ++c) X.col(c) = reconstruct(param, Vec(Y.col(c)));
  return X;
}

bool outside_training_hull(const ManifoldParam& param, const Vec& y) {
  if (param.y_max.size() != y.size()) return false;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (std::abs(y[i]) > 1.1 * param.y_max[i]) return true;
  }
  return false;
}

void write_manifold(const ManifoldParam& param, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) fail(ErrorKind::kIo, "cannot write " + path);
  fmt::print(f, "n={} m={} p={} ordering=grlex tangent={}\n", param.n, param.m, param.p,
             param.basis.lo == 1 ? "fitted" : "fixed");
  for (Eigen::Index r = 0; r < param.V.rows(); ++r) {
    for (Eigen::Index c = 0; c < param.V.cols(); ++c) {
      fmt::print(f, "{}{:.17g}", c ? " " : "", param.V(r, c));
    }
    fmt::print(f, "\n");
  }
  fmt::print(f, "y_max");
  for (Eigen::Index i = 0; i < param.y_max.size(); ++i) fmt::print(f, " {:.17g}", param.y_max[i]);
  fmt::print(f, "\n");
  for (Eigen::Index r = 0; r < param.W.rows(); ++r) {
    for (Eigen::Index c = 0; c < param.W.cols(); ++c) {
      fmt::print(f, "{}{:.17g}", c ? " " : "", param.W(r, c));
    }
    fmt::print(f, "\n");
  }
  std::fclose(f);
}

ManifoldParam read_manifold(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot read " + path);
  std::string line;
  int lineno = 1;
  if (!std::getline(in, line)) fail(ErrorKind::kParse, path + ": empty file");
  ManifoldParam p;
  char tangent[16] = {0};
  char ordering[16] = {0};
  if (std::sscanf(line.c_str(), "n=%d m=%d p=%d ordering=%15s tangent=%15s", &p.n, &p.m, &p.p,
                  ordering, tangent) != 5 ||
      std::string(ordering) != "grlex" || p.n <= 0 || p.m <= 0 || p.p < 1) {
    fail(ErrorKind::kParse, path + ":1: bad manifold header");
  }
  const bool fitted = std::string(tangent) == "fitted";
  auto read_row = [&](Eigen::Index cols, const char* what) {
    ++lineno;
    if (!std::getline(in, line)) {
      fail(ErrorKind::kParse, fmt::format("{}:{}: missing {} row", path, lineno, what));
    }
    std::istringstream ss(line);
    Vec row(cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!(ss >> row[c])) fail(ErrorKind::kParse, fmt::format("{}:{}: short {} row", path, lineno, what));
    }
    return row;
  };
  p.V.resize(2 * p.n, p.m);
  for (int r = 0; r < 2 * p.n; ++r) p.V.row(r) = read_row(p.m, "basis").transpose();
  ++lineno;
  if (!std::getline(in, line) || line.rfind("y_max", 0) != 0) {
    fail(ErrorKind::kParse, fmt::format("{}:{}: expected y_max line", path, lineno));
  }
  {
    std::istringstream ss(line.substr(5));
    p.y_max.resize(p.m);
    for (int i = 0; i < p.m; ++i) {
      if (!(ss >> p.y_max[i])) fail(ErrorKind::kParse, fmt::format("{}:{}: short y_max", path, lineno));
    }
  }
  if (fitted || p.p >= 2) {
    p.basis = MonomialBasis(p.m, fitted ? 1 : 2, p.p);
  } else {
    p.basis.m = p.m;
    p.basis.lo = 2;
    p.basis.hi = 1;
  }
  p.W.resize(2 * p.n, p.basis.size());
  for (int r = 0; r < 2 * p.n; ++r) p.W.row(r) = read_row(p.basis.size(), "coefficient").transpose();
  return p;
}

}  // namespace ssm::geometry
