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

// Inner problem and feasibility program for fixed (X, Z).
//
// Inner problem. For fixed Z every open server (n, s) needs
//   u_ns/nu_s - Lambda_ns >= t_ns,  t_ns = max over open flows of 1/(f D_s)
// (f = 1 locally, 1 - alpha remotely) and every link with open flows needs
//   B^l_en - Lambda^l_en >= T_en,   T_en = max over open flows of 1/k_sen.
// CPU is never worth more than the binding requirement, so u_ns =
// nu_s (Lambda_ns + t_ns) at an optimum. Substituting leaves a packing LP
// over the open y only:
//   max  sum lambda (w - p_cpu nu - p_trn beta) y
//   s.t. admission <= 1, access bandwidth <= B_e,
//        sum nu Lambda_es <= M_e - sum nu t_es, Lambda^l_en <= B^l_en - T_en.
// The multipliers of G are rebuilt from the packing duals: the compute price
// of each server goes onto its binding delay row (or its stability row when
// the server is closed), link prices onto the binding network-delay row, and
// closed flows receive the transfer-row multiplier that makes their reduced
// profit non-positive.
//
// Feasibility program. Every coefficient of y in G is <= 0, so y = 0 is
// optimal in  min gamma  s.t. G + gamma >= 0  and only u and gamma remain.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mecbend/formulation.hpp"
#include "mecbend/lp.hpp"
#include "mecbend/model.hpp"

namespace mecbend {

enum class InnerStatus { kOptimal, kInfeasible };

inline const char* to_string(InnerStatus s) {
  return s == InnerStatus::kOptimal ? "optimal" : "infeasible";
}

struct InnerResult {
  InnerStatus status = InnerStatus::kInfeasible;
  double objective = 0.0;  // f(X, Z), dollars/second, storage excluded
  std::vector<double> y;
  std::vector<double> u;
  std::vector<double> mu;  // one entry per canonical G row
  double kkt_residual = 0.0;
};

struct FeasibilityResult {
  double gamma = 0.0;
  std::vector<double> y;
  std::vector<double> u;
  std::vector<double> lambda;  // one entry per canonical G row
};

// Largest scaled violation among primal feasibility, complementary slackness
// and stationarity of the Lagrangian over the box domain of (Y, U).
inline double kkt_residual(const Instance& inst, const GSystem& g,
                           const std::vector<std::uint8_t>& z, const std::vector<double>& y,
                           const std::vector<double>& u, const std::vector<double>& mu) {
  const Dims& d = g.dims;
  const std::vector<double> v = pack_yu(y, u);
  double res = 0.0;
  std::vector<double> grad(g.num_vars(), 0.0), scale(g.num_vars(), 0.0);
  for (int s = 0; s < d.S; ++s)
    for (int e = 0; e < d.E; ++e)
      for (int n = 0; n < d.servers(); ++n) {
        const double lam = inst.demand(e, s);
        const double c = lam * (inst.prices.revenue(n, s) -
                                inst.prices.transfer(e, n) * inst.services[s].output);
        grad[g.y_var(s, e, n)] = c;
        scale[g.y_var(s, e, n)] = std::abs(c);
      }
  for (int n = 0; n < d.servers(); ++n)
    for (int s = 0; s < d.S; ++s) {
      grad[g.u_var(n, s)] = -inst.prices.cpu[n];
      scale[g.u_var(n, s)] = inst.prices.cpu[n];
    }
  for (int i = 0; i < static_cast<int>(g.rows.size()); ++i) {
    const double val = g.evaluate(i, z, v);
    const double mag = std::max(1.0, g.magnitude(i, z, v));
    res = std::max(res, std::max(0.0, -val) / mag);
    res = std::max(res, std::abs(mu[i] * val) / std::max(1.0, std::abs(mu[i]) * mag));
    res = std::max(res, std::max(0.0, -mu[i]));
    if (mu[i] == 0.0) continue;
    for (const lp::Term& t : g.rows[i].terms) {
      grad[t.col] += mu[i] * t.coef;
      scale[t.col] = std::max(scale[t.col], std::abs(mu[i] * t.coef));
    }
  }
  for (int j = 0; j < g.num_vars(); ++j) {
    const bool is_y = j < d.num_flows();
    const double lo = 0.0, hi = is_y ? 1.0 : kInf;
    double viol = 0.0;
    if (v[j] <= lo + 1e-12) viol = std::max(0.0, grad[j]);
    else if (v[j] >= hi - 1e-12) viol = std::max(0.0, -grad[j]);
    else viol = std::abs(grad[j]);
    res = std::max(res, viol / std::max(scale[j], 1e-300));
  }
  return res;
}

class InnerSolver {
 public:
  explicit InnerSolver(const Instance& inst) : inst_(inst), g_(build_G(inst)), d_(inst) {
    index_rows();
    opt_.feasibility_tol = inst.params.lp_tolerance;
    opt_.optimality_tol = inst.params.lp_tolerance;
  }

  const GSystem& system() const { return g_; }
  const Instance& instance() const { return inst_; }

  InnerResult solve_inner(const std::vector<std::uint8_t>& x,
                          const std::vector<std::uint8_t>& z) const {
    check_master_side(x, z);
    const Instance& inst = inst_;
    const Dims& d = d_;
    const double tol = inst.params.lp_tolerance;
    InnerResult res;

    // Requirements per server and link, with the row that sets them.
    std::vector<double> t(d.num_x(), 0.0);
    std::vector<int> t_row(d.num_x(), -1);
    std::vector<double> t_factor(d.num_x(), 0.0);
    std::vector<double> T(d.num_links(), 0.0);
    std::vector<int> T_row(d.num_links(), -1);
    std::vector<double> T_coef(d.num_links(), 0.0);
    bool structurally_infeasible = false;

    for (int s = 0; s < d.S; ++s)
      for (int e = 0; e < d.E; ++e)
        for (int n = 0; n < d.servers(); ++n) {
          const int f = d.flow(s, e, n);
          if (!z[f]) continue;
          const double factor = service_budget_factor(inst, e, n) * inst.services[s].max_delay;
          const int row = n == e ? local_row_[s * d.E + e] : remote_row_[f];
          if (!(factor > 0.0)) {
            structurally_infeasible = true;
            continue;
          }
          const double req = 1.0 / factor;
          const int k = d.x(n, s);
          if (req > t[k] || (req == t[k] && row < t_row[k])) {
            t[k] = req;
            t_row[k] = row;
            t_factor[k] = factor;
          }
          if (n == e) continue;
          const double coef = network_delay_coef(inst, s, e, n);
          if (!(coef > 0.0)) {
            structurally_infeasible = true;
            continue;
          }
          const double treq = 1.0 / coef;
          const int l = d.link(e, n);
          if (treq > T[l] || (treq == T[l] && network_row_[f] < T_row[l])) {
            T[l] = treq;
            T_row[l] = network_row_[f];
            T_coef[l] = coef;
          }
        }

    std::vector<double> cpu_rhs(d.E), link_rhs(d.num_links(), 0.0);
    bool negative_rhs = false;
    for (int e = 0; e < d.E; ++e) {
      double need = 0.0;
      for (int s = 0; s < d.S; ++s) need += inst.services[s].work * t[d.x(e, s)];
      cpu_rhs[e] = inst.topology.compute[e] - need;
      if (cpu_rhs[e] < 0.0) negative_rhs = true;
    }
    for (int e = 0; e < d.E; ++e)
      for (int n = 0; n < d.servers(); ++n) {
        if (n == e || T_row[d.link(e, n)] < 0) continue;
        const int l = d.link(e, n);
        link_rhs[l] = inst.topology.link(e, n).bandwidth - T[l];
        if (link_rhs[l] < 0.0) negative_rhs = true;
      }
    if (structurally_infeasible || negative_rhs) {
      // Within the boundary band the point is treated as feasible with the
      // negative right-hand sides clamped to zero.
      const FeasibilityResult fr = solve_feasibility(x, z);
      if (structurally_infeasible || fr.gamma > 10.0 * tol) {
        res.status = InnerStatus::kInfeasible;
        return res;
      }
      for (auto& r : cpu_rhs) r = std::max(r, 0.0);
      for (auto& r : link_rhs) r = std::max(r, 0.0);
    }

    // Packing LP over open flows with positive demand.
    lp::Problem p;
    p.maximize = true;
    std::vector<int> col_flow;
    std::vector<int> flow_col(d.num_flows(), -1);
    for (int s = 0; s < d.S; ++s)
      for (int e = 0; e < d.E; ++e) {
        const double lam = inst.demand(e, s);
        if (!(lam > 0.0)) continue;
        for (int n = 0; n < d.servers(); ++n) {
          const int f = d.flow(s, e, n);
          if (!z[f]) continue;
          const Service& svc = inst.services[s];
          const double c = lam * (inst.prices.revenue(n, s) - inst.prices.cpu[n] * svc.work -
                                  inst.prices.transfer(e, n) * svc.output);
          flow_col[f] = p.add_column(c, 0.0, kInf);
          col_flow.push_back(f);
        }
      }
    std::vector<int> adm_lp(d.S * d.E, -1), bw_lp(d.E, -1), cpu_lp(d.E, -1),
        link_lp(d.num_links(), -1);
    for (int s = 0; s < d.S; ++s)
      for (int e = 0; e < d.E; ++e) {
        std::vector<lp::Term> terms;
        for (int n = 0; n < d.servers(); ++n)
          if (flow_col[d.flow(s, e, n)] >= 0) terms.push_back({flow_col[d.flow(s, e, n)], 1.0});
        if (!terms.empty()) adm_lp[s * d.E + e] = p.add_row(std::move(terms), -kInf, 1.0);
      }
    for (int e = 0; e < d.E; ++e) {
      std::vector<lp::Term> terms;
      for (int s = 0; s < d.S; ++s)
        for (int n = 0; n < d.servers(); ++n) {
          const int c = flow_col[d.flow(s, e, n)];
          if (c >= 0) terms.push_back({c, inst.services[s].output * inst.demand(e, s)});
        }
      if (!terms.empty())
        bw_lp[e] = p.add_row(std::move(terms), -kInf, inst.topology.access_bandwidth[e]);
    }
    for (int n = 0; n < d.E; ++n) {
      std::vector<lp::Term> terms;
      for (int s = 0; s < d.S; ++s)
        for (int e = 0; e < d.E; ++e) {
          const int c = flow_col[d.flow(s, e, n)];
          if (c >= 0) terms.push_back({c, inst.services[s].work * inst.demand(e, s)});
        }
      if (!terms.empty()) cpu_lp[n] = p.add_row(std::move(terms), -kInf, cpu_rhs[n]);
    }
    for (int e = 0; e < d.E; ++e)
      for (int n = 0; n < d.servers(); ++n) {
        if (n == e) continue;
        std::vector<lp::Term> terms;
        for (int s = 0; s < d.S; ++s) {
          const int c = flow_col[d.flow(s, e, n)];
          if (c >= 0) terms.push_back({c, inst.services[s].output * inst.demand(e, s)});
        }
        if (!terms.empty()) link_lp[d.link(e, n)] = p.add_row(std::move(terms), -kInf, link_rhs[d.link(e, n)]);
      }

    std::vector<double> pi(p.num_rows(), 0.0);
    res.y.assign(d.num_flows(), 0.0);
    if (p.num_cols() > 0) {
      const lp::Result r = lp::solve(p, opt_);
      if (r.status == lp::Status::kUnbounded)
        throw NumericalError("inner problem reported unbounded");
      if (r.status != lp::Status::kOptimal)
        throw NumericalError(std::string("inner LP failed: ") + lp::to_string(r.status));
      for (int c = 0; c < p.num_cols(); ++c)
        res.y[col_flow[c]] = std::clamp(r.x[c], 0.0, 1.0);
      for (int i = 0; i < p.num_rows(); ++i) pi[i] = std::max(0.0, r.row_dual[i]);
    }
    auto dual_of = [&](int lp_row) { return lp_row >= 0 ? pi[lp_row] : 0.0; };

    const Loads loads = compute_loads(inst, res.y);
    res.u.assign(d.num_x(), 0.0);
    for (int n = 0; n < d.servers(); ++n)
      for (int s = 0; s < d.S; ++s) {
        const int k = d.x(n, s);
        if (t_row[k] >= 0 || loads.server[k] > 0.0)
          res.u[k] = inst.services[s].work * (loads.server[k] + t[k]);
      }

    Solution tmp{x, z, res.y, res.u};
    const ProfitBreakdown pb = profit(inst, tmp);
    res.objective = pb.revenue - pb.cpu - pb.transfer;

    // Multipliers on the canonical rows.
    res.mu.assign(g_.rows.size(), 0.0);
    for (int s = 0; s < d.S; ++s)
      for (int e = 0; e < d.E; ++e) res.mu[admission_row_[s * d.E + e]] = dual_of(adm_lp[s * d.E + e]);
    for (int e = 0; e < d.E; ++e) {
      res.mu[bandwidth_row_[e]] = dual_of(bw_lp[e]);
      res.mu[compute_row_[e]] = dual_of(cpu_lp[e]);
    }
    for (int n = 0; n < d.servers(); ++n)
      for (int s = 0; s < d.S; ++s) {
        const int k = d.x(n, s);
        const double mu5 = n < d.E ? dual_of(cpu_lp[n]) : 0.0;
        const double theta = inst.services[s].work * (inst.prices.cpu[n] + mu5);
        if (t_row[k] >= 0) {
          res.mu[t_row[k]] = theta / t_factor[k];
        } else {
          res.mu[server_row_[s * d.servers() + n]] = theta;
        }
      }
    for (int l = 0; l < d.num_links(); ++l)
      if (T_row[l] >= 0) {
        const int e = l / d.servers(), n = l % d.servers();
        res.mu[T_row[l]] = dual_of(link_lp[d.link(e, n)]) / T_coef[l];
      }
    for (int s = 0; s < d.S; ++s)
      for (int e = 0; e < d.E; ++e)
        for (int n = 0; n < d.servers(); ++n) {
          const int f = d.flow(s, e, n);
          if (z[f]) continue;
          const Service& svc = inst.services[s];
          const double lam = inst.demand(e, s);
          const double mu5 = n < d.E ? dual_of(cpu_lp[n]) : 0.0;
          double rho = lam * (inst.prices.revenue(n, s) -
                              inst.prices.transfer(e, n) * svc.output -
                              svc.work * (inst.prices.cpu[n] + mu5));
          rho -= dual_of(adm_lp[s * d.E + e]);
          rho -= dual_of(bw_lp[e]) * svc.output * lam;
          if (n != e) rho -= dual_of(link_lp[d.link(e, n)]) * svc.output * lam;
          res.mu[transfer_row_[f]] = std::max(0.0, rho);
        }

    res.status = InnerStatus::kOptimal;
    res.kkt_residual = kkt_residual(inst, g_, z, res.y, res.u, res.mu);
    return res;
  }

  FeasibilityResult solve_feasibility(const std::vector<std::uint8_t>& x,
                                      const std::vector<std::uint8_t>& z) const {
    check_master_side(x, z);
    const Dims& d = d_;
    const Instance& inst = inst_;
    const int R = static_cast<int>(g_.rows.size());
    const std::vector<double> zero_y(d.num_flows(), 0.0);

    // Classify rows at y = 0: u-free rows give a lower bound on gamma; the
    // rest are a * u_ns/nu_s + b + gamma >= 0 (or the compute rows).
    double bound = -kInf;
    int bound_row = -1;
    struct Cand {
      int row = -1;
      double a = kInf;
    };
    std::vector<Cand> best_b0(d.num_x()), best_b1(d.num_x());
    for (int i = 0; i < R; ++i) {
      const GRow& r = g_.rows[i];
      if (r.family == Family::kCompute) continue;
      double a = 0.0;
      int k = -1;
      for (const lp::Term& t : r.terms)
        if (t.col >= d.num_flows()) {
          a = t.coef * inst.services[r.s].work;
          k = t.col - d.num_flows();
        }
      const double b = r.constant + g_.z_part(r, z);
      if (k < 0 || !(a > 0.0)) {
        if (-b > bound) {
          bound = -b;
          bound_row = i;
        }
        continue;
      }
      Cand& c = b < 0.0 ? best_b1[k] : best_b0[k];
      if (a < c.a) c = Cand{i, a};
    }

    lp::Problem p;
    p.maximize = false;
    std::vector<int> ucol(d.num_x());
    for (int k = 0; k < d.num_x(); ++k) ucol[k] = p.add_column(0.0, 0.0, kInf);
    const int gcol = p.add_column(1.0, bound, kInf);
    std::vector<int> lp_row_of;  // G row index per LP row
    std::vector<double> sign;    // lambda = sign * dual
    for (int e = 0; e < d.E; ++e) {
      std::vector<lp::Term> terms;
      for (int s = 0; s < d.S; ++s) terms.push_back({ucol[d.x(e, s)], 1.0});
      terms.push_back({gcol, -1.0});
      p.add_row(std::move(terms), -kInf, inst.topology.compute[e]);
      lp_row_of.push_back(compute_row_[e]);
      sign.push_back(-1.0);
    }
    for (int k = 0; k < d.num_x(); ++k) {
      const int s = k % d.S;
      for (const Cand* c : {&best_b0[k], &best_b1[k]}) {
        if (c->row < 0) continue;
        const GRow& r = g_.rows[c->row];
        const double b = r.constant + g_.z_part(r, z);
        p.add_row({{ucol[k], c->a / inst.services[s].work}, {gcol, 1.0}}, -b, kInf);
        lp_row_of.push_back(c->row);
        sign.push_back(1.0);
      }
    }
    const lp::Result lr = lp::solve(p, opt_);
    if (lr.status != lp::Status::kOptimal)
      throw NumericalError(std::string("feasibility LP failed: ") + lp::to_string(lr.status));

    FeasibilityResult fr;
    fr.gamma = lr.objective;
    fr.y = zero_y;
    fr.u.assign(d.num_x(), 0.0);
    for (int k = 0; k < d.num_x(); ++k) fr.u[k] = std::max(0.0, lr.x[ucol[k]]);
    fr.lambda.assign(R, 0.0);
    double total = 0.0;
    for (int i = 0; i < p.num_rows(); ++i) {
      const double lam = std::max(0.0, sign[i] * lr.row_dual[i]);
      fr.lambda[lp_row_of[i]] += lam;
      total += lam;
    }
    if (bound_row >= 0) fr.lambda[bound_row] += std::max(0.0, 1.0 - total);
    return fr;
  }

 private:
  void index_rows() {
    const Dims& d = d_;
    admission_row_.assign(d.S * d.E, -1);
    bandwidth_row_.assign(d.E, -1);
    compute_row_.assign(d.E, -1);
    server_row_.assign(d.S * d.servers(), -1);
    local_row_.assign(d.S * d.E, -1);
    remote_row_.assign(d.num_flows(), -1);
    network_row_.assign(d.num_flows(), -1);
    transfer_row_.assign(d.num_flows(), -1);
    for (int i = 0; i < static_cast<int>(g_.rows.size()); ++i) {
      const GRow& r = g_.rows[i];
      switch (r.family) {
        case Family::kAdmission: admission_row_[r.s * d.E + r.e] = i; break;
        case Family::kAccessBandwidth: bandwidth_row_[r.e] = i; break;
        case Family::kCompute: compute_row_[r.e] = i; break;
        case Family::kServerStability: server_row_[r.s * d.servers() + r.n] = i; break;
        case Family::kLinkStability: break;
        case Family::kLocalDelay: local_row_[r.s * d.E + r.e] = i; break;
        case Family::kRemoteDelay: remote_row_[d.flow(r.s, r.e, r.n)] = i; break;
        case Family::kNetworkDelay: network_row_[d.flow(r.s, r.e, r.n)] = i; break;
        case Family::kTransfer: transfer_row_[d.flow(r.s, r.e, r.n)] = i; break;
      }
    }
  }

  void check_master_side(const std::vector<std::uint8_t>& x,
                         const std::vector<std::uint8_t>& z) const {
    const Dims& d = d_;
    if (static_cast<int>(x.size()) != d.num_x() || static_cast<int>(z.size()) != d.num_flows())
      throw IndexError("X/Z do not match instance dimensions");
    for (int s = 0; s < d.S; ++s)
      for (int e = 0; e < d.E; ++e)
        for (int n = 0; n < d.servers(); ++n)
          if (z[d.flow(s, e, n)] && (!x[d.x(n, s)] || !inst_.topology.has_link(e, n)))
            throw ContractError("z_sen = 1 requires x_ns = 1 and a link e->n");
  }

  const Instance& inst_;
  GSystem g_;
  Dims d_;
  lp::Options opt_;
  std::vector<int> admission_row_, bandwidth_row_, compute_row_, server_row_, local_row_,
      remote_row_, network_row_, transfer_row_;
};

inline InnerResult solve_inner(const Instance& inst, const std::vector<std::uint8_t>& x,
                               const std::vector<std::uint8_t>& z) {
  return InnerSolver(inst).solve_inner(x, z);
}

inline FeasibilityResult solve_feasibility(const Instance& inst, const std::vector<std::uint8_t>& x,
                                           const std::vector<std::uint8_t>& z) {
  return InnerSolver(inst).solve_feasibility(x, z);
}

// The inner problem written directly over G, for cross-checks and for the
// plain-text dump. Columns are v = [Y ; U] with the box domain as bounds.
inline lp::Problem inner_lp(const Instance& inst, const std::vector<std::uint8_t>& z) {
  const GSystem g = build_G(inst);
  const Dims& d = g.dims;
  lp::Problem p;
  p.maximize = true;
  for (int s = 0; s < d.S; ++s)
    for (int e = 0; e < d.E; ++e)
      for (int n = 0; n < d.servers(); ++n) {
        const double lam = inst.demand(e, s);
        p.add_column(lam * (inst.prices.revenue(n, s) -
                            inst.prices.transfer(e, n) * inst.services[s].output),
                     0.0, 1.0);
      }
  for (int n = 0; n < d.servers(); ++n)
    for (int s = 0; s < d.S; ++s) p.add_column(-inst.prices.cpu[n], 0.0, kInf);
  for (const GRow& r : g.rows) {
    // constant + z + terms.v >= 0   ->   terms.v >= -(constant + z)
    p.add_row(r.terms, -(r.constant + g.z_part(r, z)), kInf);
  }
  return p;
}

}  // namespace mecbend
