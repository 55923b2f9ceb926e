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

#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "mecbend/gbd.hpp"
#include "mecbend/master.hpp"
#include "oracle.hpp"
#include "test_support.hpp"

namespace {

using namespace mecbend;

// Cut pool after `iters` GBD iterations.
std::vector<Cut> cuts_after(const Instance& base, int iters) {
  Instance inst = base;
  inst.params.max_iterations = iters;
  inst.params.epsilon = 1e-12;
  return solve_gbd(inst).cuts;
}

// Best value of the relaxed master by brute force over every binary point.
double brute_master(const Instance& inst, const std::vector<Cut>& cuts) {
  const Dims d(inst);
  const auto mask = presolve_mask(inst);
  double best = -kInf;
  const int xbits = d.E * d.S;
  for (long xm = 0; xm < (1L << xbits); ++xm) {
    std::vector<std::uint8_t> x = cloud_only(inst).x;
    for (int i = 0; i < xbits; ++i) x[i] = (xm >> i) & 1;
    if (!fixtures::storage_ok(inst, x)) continue;
    std::vector<int> free;
    for (int s = 0; s < d.S; ++s)
      for (int e = 0; e < d.E; ++e)
        for (int n = 0; n < d.servers(); ++n)
          if (mask[d.flow(s, e, n)] && x[d.x(n, s)]) free.push_back(d.flow(s, e, n));
    for (long zm = 0; zm < (1L << free.size()); ++zm) {
      std::vector<std::uint8_t> z(d.num_flows(), 0);
      for (std::size_t i = 0; i < free.size(); ++i) z[free[i]] = (zm >> i) & 1;
      double ub = kInf;
      bool ok = true;
      for (const Cut& c : cuts) {
        const double v = c.evaluate(x, z);
        if (c.kind == CutKind::kOptimality) ub = std::min(ub, v);
        else if (v < 0.0) ok = false;
      }
      if (ok) best = std::max(best, ub);
    }
  }
  return best;
}

void expect_master_feasible(const Instance& inst, const std::vector<Cut>& cuts,
                            const MasterResult& m) {
  const Dims d(inst);
  EXPECT_TRUE(fixtures::storage_ok(inst, m.x));
  for (int s = 0; s < d.S; ++s) EXPECT_EQ(m.x[d.x(d.cloud(), s)], 1);
  for (int s = 0; s < d.S; ++s)
    for (int e = 0; e < d.E; ++e)
      for (int n = 0; n < d.servers(); ++n)
        if (m.z[d.flow(s, e, n)]) {
          EXPECT_TRUE(m.x[d.x(n, s)]);
          EXPECT_TRUE(flow_allowed(inst, s, e, n));
        }
  for (const Cut& c : cuts) {
    const double v = c.evaluate(m.x, m.z);
    const double tol = 1e-6 * std::max(1.0, std::abs(v));
    if (c.kind == CutKind::kOptimality) EXPECT_GE(v, m.ub - tol);
    else EXPECT_GE(v, -tol);
  }
}

TEST(Master, FlatCutPicksCloudOnly) {
  const Instance inst = fixtures::tiny_instance(2, 2, 2);
  const Dims d(inst);
  Cut c;
  c.constant = 0.3;
  for (int n = 0; n < d.servers(); ++n)
    for (int s = 0; s < d.S; ++s)
      c.coeff_x.push_back({d.x(n, s), -inst.services[s].size * inst.prices.storage[n]});
  const MasterResult m = solve_master(inst, {c});
  ASSERT_EQ(m.status, MasterStatus::kOptimal);
  EXPECT_NEAR(m.ub, 0.3 - storage_cost(inst, cloud_only(inst).x), 1e-12);
  EXPECT_EQ(m.x, cloud_only(inst).x);
}

TEST(Master, NoCutsMeansNoBound) {
  const Instance inst = fixtures::tiny_instance(2, 2, 2);
  const Master master(inst);
  EXPECT_THROW(master.solve({}), ContractError);
}

TEST(Master, MatchesBruteForceMidRun) {
  for (int seed = 1; seed <= 8; ++seed) {
    const Instance inst = fixtures::tiny_instance(seed, 2, 2);
    for (int iters : {2, 4, 8}) {
      const std::vector<Cut> cuts = cuts_after(inst, iters);
      bool has_opt = false;
      for (const Cut& c : cuts) has_opt |= c.kind == CutKind::kOptimality;
      if (!has_opt) continue;
      const MasterResult m = solve_master(inst, cuts);
      ASSERT_EQ(m.status, MasterStatus::kOptimal);
      const double want = brute_master(inst, cuts);
      EXPECT_NEAR(m.ub, want, 1e-9 * std::max(1.0, std::abs(want)))
          << "seed " << seed << " iters " << iters;
      expect_master_feasible(inst, cuts, m);

      MasterOptions mf;
      mf.branching = Branching::kMostFractional;
      EXPECT_NEAR(solve_master(inst, cuts, mf).ub, want, 1e-9 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST(Master, UpperBoundNonincreasingAsCutsGrow) {
  const Instance inst = fixtures::tiny_instance(3, 3, 2);
  const std::vector<Cut> cuts = cuts_after(inst, 30);
  double prev = kInf;
  std::vector<Cut> pool;
  for (const Cut& c : cuts) {
    pool.push_back(c);
    if (pool.front().kind != CutKind::kOptimality) continue;
    const MasterResult m = solve_master(inst, pool);
    ASSERT_EQ(m.status, MasterStatus::kOptimal);
    EXPECT_LE(m.ub, prev + 1e-12);
    prev = m.ub;
  }
}

TEST(Master, CloudOnlySatisfiesEveryCut) {
  for (int seed = 1; seed <= 10; ++seed) {
    const Instance inst = fixtures::tiny_instance(seed, 3, 2);
    const Dims d(inst);
    const auto x = cloud_only(inst).x;
    const std::vector<std::uint8_t> z(d.num_flows(), 0);
    for (const Cut& c : cuts_after(inst, 40))
      if (c.kind == CutKind::kFeasibility) EXPECT_GE(c.evaluate(x, z), -1e-8);
      else EXPECT_GE(c.evaluate(x, z), -storage_cost(inst, x) - 1e-12);
  }
}

TEST(Master, CutoffDiscardsEverything) {
  const Instance inst = fixtures::tiny_instance(5, 2, 2);
  const std::vector<Cut> cuts = cuts_after(inst, 4);
  const MasterResult full = solve_master(inst, cuts);
  const double cutoff = full.ub + 1e-3;
  const MasterResult m = Master(inst).solve(cuts, cutoff);
  EXPECT_EQ(m.status, MasterStatus::kBelowCutoff);
  EXPECT_GE(m.ub, full.ub - 1e-12);
  EXPECT_LE(m.ub, cutoff);
}

TEST(Master, Deterministic) {
  const Instance inst = fixtures::tiny_instance(6, 3, 2);
  const std::vector<Cut> cuts = cuts_after(inst, 10);
  const MasterResult a = solve_master(inst, cuts), b = solve_master(inst, cuts);
  EXPECT_EQ(a.ub, b.ub);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.z, b.z);
}

}  // namespace
