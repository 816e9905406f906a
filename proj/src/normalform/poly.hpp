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

// Evaluation helpers for sparse complex polynomials in (z, conj z).

#pragma once

#include <vector>

#include "normalform/normalform.hpp"

namespace ssm::normalform::detail {

// Powers w_i^e for w = (z, conj z), e = 0..max_order.
class Powers {
 public:
  Powers(const CVec& z, int max_order);
  cplx monomial(const Monomial& m) const;
  // d/dz_i and d/dconj(z_i) of the monomial.
  cplx d_dz(const Monomial& m, int i) const;
  cplx d_dzbar(const Monomial& m, int i) const;

 private:
  cplx pw(int var, int e) const { return e < 0 ? cplx(0.0) : table_[var * stride_ + e]; }
  int modes_;
  int stride_;
  std::vector<cplx> table_;
};

int max_order(const std::vector<std::vector<Monomial>>& terms);

// sum_k c_k m_k(z) per equation
CVec evaluate(const std::vector<std::vector<Monomial>>& terms,
              const std::vector<std::vector<cplx>>& coeffs, const Powers& pw);

// P(j, i) = d f_j / d z_i, Q(j, i) = d f_j / d conj(z_i)
void wirtinger(const std::vector<std::vector<Monomial>>& terms,
               const std::vector<std::vector<cplx>>& coeffs, const Powers& pw, CMat& P, CMat& Q);

// Real 2M x 2M Jacobian from Wirtinger derivatives, variables
// [Re z, Im z] and outputs [Re f, Im f].
Mat real_jacobian(const CMat& P, const CMat& Q);

}  // namespace ssm::normalform::detail
