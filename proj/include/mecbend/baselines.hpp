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

// Comparison solvers.
//
//   nc  non-cooperative: every request is served at its own BS. Each BS is
//       an independent single-server problem solved by GBD.
//   ao  alternating optimization between (Y, U) and (X, Z).
//   rr  relax-and-round: one LP over the continuous relaxation of (X, Z)
//       together with (Y, U), rounded at 0.5 with storage repair. This one is
//       a stand-in for external relax-and-round schemes; reports carry
//       "non_paper": true for it.

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "mecbend/formulation.hpp"
#include "mecbend/gbd.hpp"
#include "mecbend/lp.hpp"
#include "mecbend/master.hpp"
#include "mecbend/subproblems.hpp"

namespace mecbend {

struct BaselineReport {
  std::string name;
  Solution solution;
  double profit = 0.0;
  double wall_ms = 0.0;
  GbdStatus status = GbdStatus::kConverged;
  bool non_paper = false;
};

namespace detail {

inline double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

// Single-BS restriction of `inst` to base station e (cloud kept as server 1).
inline Instance single_bs(const Instance& inst, int e) {
  const int S = inst.num_services();
  const int c = inst.cloud();
  Instance sub;
  sub.topology = Topology(1);
  sub.topology.storage[0] = inst.topology.storage[e];
  sub.topology.compute[0] = inst.topology.compute[e];
  sub.topology.access_bandwidth[0] = inst.topology.access_bandwidth[e];
  const Link& cl = inst.topology.link(e, c);
  sub.topology.set_link(0, 1, cl.bandwidth, cl.propagation);
  sub.services = inst.services;
  sub.demand = Demand(1, S);
  for (int s = 0; s < S; ++s) sub.demand(0, s) = inst.demand(e, s);
  sub.prices = PriceBook(1, S);
  sub.prices.storage = {inst.prices.storage[e], inst.prices.storage[c]};
  sub.prices.cpu = {inst.prices.cpu[e], inst.prices.cpu[c]};
  sub.prices.transfer(0, 1) = inst.prices.transfer(e, c);
  for (int s = 0; s < S; ++s) {
    sub.prices.revenue(0, s) = inst.prices.revenue(e, s);
    sub.prices.revenue(1, s) = inst.prices.revenue(c, s);
  }
  sub.params = inst.params;
  return sub;
}

inline GbdStatus worse(GbdStatus a, GbdStatus b) {
  auto rank = [](GbdStatus s) {
    return s == GbdStatus::kConverged ? 0 : s == GbdStatus::kIterationLimit ? 1 : 2;
  };
  return rank(a) >= rank(b) ? a : b;
}

}  // namespace detail

inline BaselineReport solve_nc(const Instance& inst, const MasterOptions& master = {}) {
  const auto start = std::chrono::steady_clock::now();
  const Dims d(inst);
  BaselineReport rep;
  rep.name = "nc";
  rep.solution = cloud_only(inst);
  for (int e = 0; e < d.E; ++e) {
    const Instance sub = detail::single_bs(inst, e);
    const Dims sd(sub);
    GbdOptions opt;
    opt.master = master;
    opt.flow_mask.assign(sd.num_flows(), 0);
    for (int s = 0; s < d.S; ++s) opt.flow_mask[sd.flow(s, 0, 0)] = 1;
    const GbdResult r = solve_gbd(sub, opt);
    rep.status = detail::worse(rep.status, r.status);
    const Solution& ss = r.solution;
    for (int s = 0; s < d.S; ++s) {
      rep.solution.x[d.x(e, s)] = ss.x[sd.x(0, s)];
      rep.solution.u[d.x(e, s)] = ss.u[sd.x(0, s)];
      rep.solution.z[d.flow(s, e, e)] = ss.z[sd.flow(s, 0, 0)];
      rep.solution.y[d.flow(s, e, e)] = ss.y[sd.flow(s, 0, 0)];
    }
  }
  rep.profit = profit(inst, rep.solution).total;
  rep.wall_ms = detail::elapsed_ms(start);
  return rep;
}

// Alternating optimization from the GBD initializer. With (Y, U) fixed the
// best (X, Z) opens exactly the flows carrying traffic and stores exactly the
// replicas they use; any extra open flow only adds delay requirements.
inline BaselineReport solve_ao(const Instance& inst, int max_rounds = 50) {
  const auto start = std::chrono::steady_clock::now();
  const Dims d(inst);
  const InnerSolver inner(inst);
  const double tol = inst.params.lp_tolerance;
  BaselineReport rep;
  rep.name = "ao";

  Solution cur = cloud_only(inst);
  InnerResult r = inner.solve_inner(cur.x, cur.z);
  cur.y = r.y;
  cur.u = r.u;
  double value = r.objective - storage_cost(inst, cur.x);
  const double eps = inst.params.epsilon.value_or(1e-4 * std::max(1.0, std::abs(value)));

  for (int round = 0; round < max_rounds; ++round) {
    Solution next = cloud_only(inst);
    for (int s = 0; s < d.S; ++s)
      for (int e = 0; e < d.E; ++e)
        for (int n = 0; n < d.servers(); ++n) {
          const int f = d.flow(s, e, n);
          if (cur.y[f] > tol) {
            next.z[f] = 1;
            next.x[d.x(n, s)] = 1;
          }
        }
    const InnerResult nr = inner.solve_inner(next.x, next.z);
    if (nr.status != InnerStatus::kOptimal) break;
    next.y = nr.y;
    next.u = nr.u;
    const double nv = nr.objective - storage_cost(inst, next.x);
    if (nv < value + eps) {
      if (nv > value) {
        cur = std::move(next);
        value = nv;
      }
      break;
    }
    cur = std::move(next);
    value = nv;
  }
  rep.solution = std::move(cur);
  rep.profit = profit(inst, rep.solution).total;
  rep.wall_ms = detail::elapsed_ms(start);
  return rep;
}

// The LP relaxation with z = y substituted (at a relaxed optimum z can always
// be lowered to y) and BS placements x in [0, 1].
inline lp::Problem relaxation_lp(const Instance& inst) {
  const GSystem g = build_G(inst);
  const Dims& d = g.dims;
  const auto allowed = presolve_mask(inst);
  lp::Problem p = inner_lp(inst, std::vector<std::uint8_t>(d.num_flows(), 1));
  p.rows.clear();
  for (int f = 0; f < d.num_flows(); ++f)
    if (!allowed[f]) p.col_upper[f] = 0.0;
  const int x0 = p.num_cols();
  for (int n = 0; n < d.E; ++n)
    for (int s = 0; s < d.S; ++s)
      p.add_column(-inst.services[s].size * inst.prices.storage[n], 0.0, 1.0);
  for (const GRow& r : g.rows) {
    if (r.family == Family::kTransfer) continue;
    std::vector<lp::Term> t = r.terms;
    if (r.z_flow >= 0) t.push_back({r.z_flow, r.z_coef});
    p.add_row(std::move(t), -r.constant, kInf);
  }
  for (int s = 0; s < d.S; ++s)
    for (int e = 0; e < d.E; ++e)
      for (int n = 0; n < d.E; ++n) {
        const int f = d.flow(s, e, n);
        if (allowed[f]) p.add_row({{f, 1.0}, {x0 + d.x(n, s), -1.0}}, -kInf, 0.0);
      }
  for (int e = 0; e < d.E; ++e) {
    std::vector<lp::Term> t;
    for (int s = 0; s < d.S; ++s) t.push_back({x0 + d.x(e, s), inst.services[s].size});
    p.add_row(std::move(t), -kInf, inst.topology.storage[e]);
  }
  return p;
}

inline BaselineReport solve_relax_round(const Instance& inst) {
  const auto start = std::chrono::steady_clock::now();
  const Dims d(inst);
  const InnerSolver inner(inst);
  const auto allowed = presolve_mask(inst);
  BaselineReport rep;
  rep.name = "rr";
  rep.non_paper = true;

  const lp::Problem p = relaxation_lp(inst);
  lp::Options lpo;
  lpo.feasibility_tol = inst.params.lp_tolerance;
  lpo.optimality_tol = inst.params.lp_tolerance;
  const lp::Result lr = lp::solve(p, lpo);
  if (lr.status != lp::Status::kOptimal)
    throw NumericalError(std::string("relaxation LP failed: ") + lp::to_string(lr.status));
  const int x0 = d.num_flows() + d.num_x();

  std::vector<std::uint8_t> x = cloud_only(inst).x;
  for (int i = 0; i < d.E * d.S; ++i) x[i] = lr.x[x0 + i] >= 0.5;
  // Storage repair: drop the placement with the lowest relaxed value first.
  for (int e = 0; e < d.E; ++e) {
    auto used = [&] {
      double u = 0.0;
      for (int s = 0; s < d.S; ++s)
        if (x[d.x(e, s)]) u += inst.services[s].size;
      return u;
    };
    while (used() > inst.topology.storage[e]) {
      int drop = -1;
      for (int s = 0; s < d.S; ++s)
        if (x[d.x(e, s)] && (drop < 0 || lr.x[x0 + d.x(e, s)] < lr.x[x0 + d.x(e, drop)]))
          drop = s;
      x[d.x(e, drop)] = 0;
    }
  }
  std::vector<std::uint8_t> z(d.num_flows(), 0);
  for (int s = 0; s < d.S; ++s)
    for (int e = 0; e < d.E; ++e)
      for (int n = 0; n < d.servers(); ++n) {
        const int f = d.flow(s, e, n);
        z[f] = allowed[f] && x[d.x(n, s)] && lr.x[f] >= 0.5;
      }

  // Fallbacks: keep only the cloud flows, then nothing.
  std::vector<std::uint8_t> cloud_x = cloud_only(inst).x, cloud_z(d.num_flows(), 0);
  for (int s = 0; s < d.S; ++s)
    for (int e = 0; e < d.E; ++e) cloud_z[d.flow(s, e, d.cloud())] = z[d.flow(s, e, d.cloud())];
  const std::vector<std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>>> tries = {
      {x, z}, {cloud_x, cloud_z}, {cloud_x, std::vector<std::uint8_t>(d.num_flows(), 0)}};
  for (const auto& [tx, tz] : tries) {
    const InnerResult r = inner.solve_inner(tx, tz);
    if (r.status != InnerStatus::kOptimal) continue;
    rep.solution = Solution{tx, tz, r.y, r.u};
    break;
  }
  rep.profit = profit(inst, rep.solution).total;
  rep.wall_ms = detail::elapsed_ms(start);
  return rep;
}

inline BaselineReport solve_gbd_report(const Instance& inst, const GbdOptions& opt = {}) {
  const auto start = std::chrono::steady_clock::now();
  const GbdResult r = solve_gbd(inst, opt);
  BaselineReport rep;
  rep.name = "gbd";
  rep.solution = r.solution;
  rep.status = r.status;
  rep.profit = profit(inst, rep.solution).total;
  rep.wall_ms = detail::elapsed_ms(start);
  return rep;
}

inline BaselineReport solve_method(const Instance& inst, const std::string& method,
                                   const GbdOptions& opt = {}) {
  if (method == "gbd") return solve_gbd_report(inst, opt);
  if (method == "nc") return solve_nc(inst, opt.master);
  if (method == "ao") return solve_ao(inst);
  if (method == "rr") return solve_relax_round(inst);
  throw Error("unknown method '" + method + "'");
}

}  // namespace mecbend
