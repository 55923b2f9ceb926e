// Copyright 2026 The mecbend Authors
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

// Affine cuts over (X, Z) built from inner-problem multipliers.
//
//   optimality:  UB <= f^ - P_str(X) + sum_{delay rows} mu_i G_i(X, Z, Y^, U^)
//   feasibility: 0  <= sum_{all rows} lambda_i G_i(X, Z, Y-, U-)
//
// G does not depend on X, so X enters only through the storage cost. All
// (X, Z)-independent terms are folded into `constant`.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mecbend/formulation.hpp"
#include "mecbend/subproblems.hpp"

namespace mecbend {

enum class CutKind { kOptimality, kFeasibility };

inline const char* to_string(CutKind k) {
  return k == CutKind::kOptimality ? "optimality" : "feasibility";
}

struct Cut {
  CutKind kind = CutKind::kOptimality;
  double constant = 0.0;
  std::vector<std::pair<int, double>> coeff_x;  // (n*S + s, coefficient), sorted
  std::vector<std::pair<int, double>> coeff_z;  // (flow index, coefficient), sorted
  int iteration = 0;
  std::vector<std::uint8_t> x_hat;
  std::vector<std::uint8_t> z_hat;

  template <class XVec, class ZVec>
  double evaluate(const XVec& x, const ZVec& z) const {
    double v = constant;
    for (const auto& [i, c] : coeff_x) v += c * static_cast<double>(x[i]);
    for (const auto& [i, c] : coeff_z) v += c * static_cast<double>(z[i]);
    return v;
  }
};

namespace detail {

inline std::vector<std::pair<int, double>> to_sparse(const std::map<int, double>& m) {
  std::vector<std::pair<int, double>> out;
  for (const auto& [i, c] : m)
    if (c != 0.0) out.emplace_back(i, c);
  return out;
}

}  // namespace detail

inline Cut make_optimality_cut(const Instance& inst, const GSystem& g,
                               const std::vector<std::uint8_t>& x_hat,
                               const std::vector<std::uint8_t>& z_hat, const InnerResult& inner,
                               int iteration = 0) {
  if (inner.status != InnerStatus::kOptimal)
    throw ContractError("optimality cut requires an optimal inner result");
  const Dims& d = g.dims;
  Cut cut;
  cut.kind = CutKind::kOptimality;
  cut.iteration = iteration;
  cut.x_hat = x_hat;
  cut.z_hat = z_hat;
  cut.constant = inner.objective;
  std::map<int, double> cx, cz;
  for (int n = 0; n < d.servers(); ++n)
    for (int s = 0; s < d.S; ++s) {
      const double c = -inst.services[s].size * inst.prices.storage[n];
      if (c != 0.0) cx[d.x(n, s)] = c;
    }
  const std::vector<double> v = pack_yu(inner.y, inner.u);
  for (int i = 0; i < static_cast<int>(g.rows.size()); ++i) {
    const GRow& r = g.rows[i];
    const double mu = inner.mu[i];
    if (mu == 0.0 || !is_delay_family(r.family)) continue;
    cut.constant += mu * g.yu_part(r, v);
    if (r.z_flow >= 0) cz[r.z_flow] += mu * r.z_coef;
  }
  cut.coeff_x = detail::to_sparse(cx);
  cut.coeff_z = detail::to_sparse(cz);
  return cut;
}

inline Cut make_feasibility_cut(const Instance& inst, const GSystem& g,
                                const std::vector<std::uint8_t>& x_hat,
                                const std::vector<std::uint8_t>& z_hat,
                                const FeasibilityResult& feas, int iteration = 0) {
  if (!(feas.gamma > 10.0 * inst.params.lp_tolerance))
    throw ContractError("feasibility cut requires an infeasible inner problem");
  Cut cut;
  cut.kind = CutKind::kFeasibility;
  cut.iteration = iteration;
  cut.x_hat = x_hat;
  cut.z_hat = z_hat;
  std::map<int, double> cz;
  const std::vector<double> v = pack_yu(feas.y, feas.u);
  for (int i = 0; i < static_cast<int>(g.rows.size()); ++i) {
    const GRow& r = g.rows[i];
    const double lam = feas.lambda[i];
    if (lam == 0.0) continue;
    cut.constant += lam * g.yu_part(r, v);
    if (r.z_flow >= 0) cz[r.z_flow] += lam * r.z_coef;
  }
  cut.coeff_z = detail::to_sparse(cz);
  return cut;
}

}  // namespace mecbend
