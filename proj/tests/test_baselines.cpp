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

#include "mecbend/baselines.hpp"
#include "oracle.hpp"
#include "test_support.hpp"

namespace {

using namespace mecbend;

Instance tight(Instance inst) {
  inst.params.epsilon = 1e-10;
  return inst;
}

void expect_feasible(const Instance& inst, const BaselineReport& r) {
  EXPECT_TRUE(check_reformulated(inst, r.solution).empty()) << r.name;
  EXPECT_TRUE(check_original(inst, r.solution).empty()) << r.name;
  EXPECT_NEAR(r.profit, profit(inst, r.solution).total, 1e-15) << r.name;
}

TEST(Baselines, DominatedByGbd) {
  for (int seed = 1; seed <= 12; ++seed) {
    const Instance inst = tight(fixtures::tiny_instance(seed, 2 + seed % 2, 2));
    const BaselineReport g = solve_gbd_report(inst);
    ASSERT_EQ(g.status, GbdStatus::kConverged);
    expect_feasible(inst, g);
    for (const char* m : {"nc", "ao", "rr"}) {
      const BaselineReport b = solve_method(inst, m);
      expect_feasible(inst, b);
      EXPECT_GE(g.profit, b.profit - 1e-6) << m << " seed " << seed;
    }
  }
}

TEST(Baselines, NcEqualsGbdOnSingleBs) {
  for (int seed = 1; seed <= 8; ++seed) {
    const Instance inst = tight(fixtures::tiny_instance(seed, 1, 1 + seed % 3));
    const double g = solve_gbd_report(inst).profit;
    const BaselineReport nc = solve_nc(inst);
    // NC keeps requests at the BS; a single-BS GBD may still use the cloud.
    const Dims d(inst);
    GbdOptions local;
    local.flow_mask.assign(d.num_flows(), 0);
    for (int s = 0; s < d.S; ++s) local.flow_mask[d.flow(s, 0, 0)] = 1;
    EXPECT_NEAR(nc.profit, solve_gbd_report(inst, local).profit, 1e-9);
    EXPECT_LE(nc.profit, g + 1e-9);
  }
}

TEST(Baselines, CooperationBeatsNonCooperative) {
  const Instance inst = tight(fixtures::storage_starved_instance());
  const double nc = solve_nc(inst).profit;
  const double g = solve_gbd_report(inst).profit;
  const auto oracle = fixtures::enumerate_all(inst);
  EXPECT_NEAR(g, oracle.best, 1e-9);
  EXPECT_GT(g - nc, 1e-4);
  EXPECT_NEAR(nc, -storage_cost(inst, cloud_only(inst).x), 1e-12);
}

TEST(Baselines, ZeroDemand) {
  Instance inst = fixtures::tiny_instance(3, 2, 2);
  for (int e = 0; e < inst.num_bs(); ++e)
    for (int s = 0; s < inst.num_services(); ++s) inst.demand(e, s) = 0.0;
  const double cloud = -storage_cost(inst, cloud_only(inst).x);
  for (const char* m : {"gbd", "nc", "ao", "rr"}) {
    const BaselineReport r = solve_method(inst, m);
    EXPECT_NEAR(r.profit, cloud, 1e-15) << m;
    EXPECT_EQ(hit_ratio(inst, r.solution), 0.0) << m;
  }
  EXPECT_EQ(solve_relax_round(inst).solution.x, cloud_only(inst).x);
}

TEST(Baselines, AoStartsFromGbdInitializer) {
  for (int seed = 1; seed <= 6; ++seed) {
    const Instance inst = fixtures::tiny_instance(seed, 3, 2);
    const GbdResult g = solve_gbd(inst);
    const BaselineReport ao = solve_ao(inst);
    EXPECT_GE(ao.profit, g.trace.front().lb - 1e-12);
  }
}

TEST(Baselines, RelaxRoundIsLabelled) {
  const Instance inst = fixtures::tiny_instance(1, 2, 2);
  EXPECT_TRUE(solve_relax_round(inst).non_paper);
  EXPECT_FALSE(solve_nc(inst).non_paper);
  EXPECT_THROW(solve_method(inst, "cspr"), Error);
}

}  // namespace
