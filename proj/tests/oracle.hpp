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

// Enumeration oracles over master-feasible binary (X, Z).
//
// enumerate_all visits every point. enumerate_classes visits one maximal
// point per dominance class: for fixed X the inner value depends on Z only
// through the set of open flows, the per-(n,s) service-delay requirement
// (none / local-only / remote) and the per-link congestion requirement
// max 1/k over open flows. Within a class, opening every flow consistent with
// the requirements only enlarges the feasible set, so the class maximum sits
// at that point. Placing a replica with no open flow is dominated by not
// placing it. A link whose largest requirement cannot bind even at full load
// is fixed at that requirement.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <mutex>
#include <set>
#include <thread>
#include <vector>

#include "mecbend/formulation.hpp"
#include "mecbend/master.hpp"
#include "mecbend/subproblems.hpp"

namespace mecbend::fixtures {

struct EnumPoint {
  std::vector<std::uint8_t> x;
  std::vector<std::uint8_t> z;
  bool feasible = false;
  double value = 0.0;  // f(X, Z) - P_str(X) when feasible
};

struct EnumResult {
  double best = -kInf;
  Solution best_solution;
  long inner_solves = 0;
};

// Called once per visited point, serialized under a lock.
using Visitor = std::function<void(const EnumPoint&)>;

inline bool storage_ok(const Instance& inst, const std::vector<std::uint8_t>& x) {
  const Dims d(inst);
  for (int e = 0; e < d.E; ++e) {
    double used = 0.0;
    for (int s = 0; s < d.S; ++s)
      if (x[d.x(e, s)]) used += inst.services[s].size;
    if (used > inst.topology.storage[e]) return false;
  }
  return true;
}

namespace detail {

inline void record(const Instance& inst, const InnerSolver& solver, std::vector<std::uint8_t> x,
                   std::vector<std::uint8_t> z, const Visitor& visit, std::mutex& lock,
                   EnumResult& out) {
  EnumPoint p;
  const InnerResult r = solver.solve_inner(x, z);
  ++out.inner_solves;
  p.feasible = r.status == InnerStatus::kOptimal;
  if (p.feasible) {
    p.value = r.objective - storage_cost(inst, x);
    if (p.value > out.best) {
      out.best = p.value;
      out.best_solution = Solution{x, z, r.y, r.u};
    }
  }
  if (visit) {
    p.x = std::move(x);
    p.z = std::move(z);
    std::lock_guard<std::mutex> g(lock);
    visit(p);
  }
}

inline void merge(EnumResult& into, EnumResult&& part) {
  into.inner_solves += part.inner_solves;
  if (part.best > into.best) {
    into.best = part.best;
    into.best_solution = std::move(part.best_solution);
  }
}

// Runs body(k, out) for k in [0, count) over hardware threads and merges the
// partial results in index order, so the output does not depend on timing.
inline EnumResult parallel(long count, const std::function<void(long, EnumResult&)>& body) {
  const int threads = std::max(1u, std::thread::hardware_concurrency());
  const long chunks = std::min<long>(count, threads * 8L);
  std::vector<EnumResult> parts(std::max(0L, chunks));
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (long c; (c = next++) < chunks;)
        for (long k = c * count / chunks; k < (c + 1) * count / chunks; ++k) body(k, parts[c]);
    });
  for (auto& th : pool) th.join();
  EnumResult out;
  for (auto& p : parts) merge(out, std::move(p));
  return out;
}

}  // namespace detail

// Every master-feasible (X, Z): storage, z <= x and the presolve mask.
inline EnumResult enumerate_all(const Instance& inst, const Visitor& visit = {}) {
  const Dims d(inst);
  const auto mask = presolve_mask(inst);
  const InnerSolver solver(inst);
  std::mutex lock;
  const int xbits = d.E * d.S;
  if (xbits > 20) throw Error("enumerate_all: instance too large");
  return detail::parallel(1L << xbits, [&](long xm, EnumResult& out) {
    std::vector<std::uint8_t> x = cloud_only(inst).x;
    for (int i = 0; i < xbits; ++i) x[i] = (xm >> i) & 1;
    if (!storage_ok(inst, x)) return;
    std::vector<int> free;
    for (int f = 0; f < d.num_flows(); ++f) {
      const int n = f % d.servers();
      const int s = f / (d.E * d.servers());
      if (mask[f] && x[d.x(n, s)]) free.push_back(f);
    }
    if (free.size() > 22) throw Error("enumerate_all: too many free flows");
    for (long zm = 0; zm < (1L << free.size()); ++zm) {
      std::vector<std::uint8_t> z(d.num_flows(), 0);
      for (std::size_t i = 0; i < free.size(); ++i) z[free[i]] = (zm >> i) & 1;
      detail::record(inst, solver, x, z, visit, lock, out);
    }
  });
}

// One maximal point per dominance class (see the file comment).
inline EnumResult enumerate_classes(const Instance& inst, const Visitor& visit = {}) {
  const Dims d(inst);
  const auto mask = presolve_mask(inst);
  const InnerSolver solver(inst);
  std::mutex lock;
  const int E = d.E, S = d.S;

  // Per-link candidate requirements, ascending; -1 means "no flow".
  std::vector<std::vector<double>> link_levels(E * d.servers());
  for (int e = 0; e < E; ++e)
    for (int n = 0; n < d.servers(); ++n) {
      if (n == e || !inst.topology.has_link(e, n)) continue;
      std::set<double> req;
      double full_load = 0.0;
      for (int s = 0; s < S; ++s)
        if (mask[d.flow(s, e, n)] && inst.demand(e, s) > 0.0) {
          req.insert(1.0 / network_delay_coef(inst, s, e, n));
          full_load += inst.services[s].output * inst.demand(e, s);
        }
      auto& lv = link_levels[e * d.servers() + n];
      if (req.empty()) continue;
      const double top = *req.rbegin();
      if (inst.topology.link(e, n).bandwidth - top >= full_load) {
        lv.push_back(top);
      } else {
        lv.push_back(-1.0);
        lv.insert(lv.end(), req.begin(), req.end());
      }
    }
  std::vector<int> links;
  for (int i = 0; i < static_cast<int>(link_levels.size()); ++i)
    if (!link_levels[i].empty()) links.push_back(i);

  // Node levels: BS (n,s) in {0, local, remote}, cloud (s) in {0, remote}.
  long node_combos = 1;
  for (int i = 0; i < E * S; ++i) node_combos *= 3;
  node_combos <<= S;
  long link_combos = 1;
  for (int l : links) link_combos *= static_cast<long>(link_levels[l].size());
  if (node_combos * link_combos > 50'000'000L) throw Error("enumerate_classes: too large");

  return detail::parallel(node_combos * link_combos, [&](long k, EnumResult& out) {
    long nk = k / link_combos, lk = k % link_combos;
    std::vector<int> level(d.num_x(), 0);
    for (int i = 0; i < E * S; ++i) {
      level[i] = static_cast<int>(nk % 3);
      nk /= 3;
    }
    for (int s = 0; s < S; ++s) level[d.x(d.cloud(), s)] = ((nk >> s) & 1) ? 2 : 0;
    std::vector<double> threshold(link_levels.size(), -1.0);
    for (int l : links) {
      const long m = static_cast<long>(link_levels[l].size());
      threshold[l] = link_levels[l][lk % m];
      lk /= m;
    }
    std::vector<std::uint8_t> x = cloud_only(inst).x;
    for (int i = 0; i < E * S; ++i) x[i] = level[i] >= 1;
    if (!storage_ok(inst, x)) return;
    std::vector<std::uint8_t> z(d.num_flows(), 0);
    for (int s = 0; s < S; ++s)
      for (int e = 0; e < E; ++e)
        for (int n = 0; n < d.servers(); ++n) {
          const int f = d.flow(s, e, n);
          if (!mask[f]) continue;
          const int lv = level[d.x(n, s)];
          if (n == e) {
            z[f] = lv >= 1;
          } else {
            const double t = threshold[e * d.servers() + n];
            z[f] = lv == 2 && t >= 0.0 && 1.0 / network_delay_coef(inst, s, e, n) <= t;
          }
        }
    detail::record(inst, solver, std::move(x), std::move(z), visit, lock, out);
  });
}

}  // namespace mecbend::fixtures
