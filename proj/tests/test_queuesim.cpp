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

#include <cmath>
#include <sstream>

#include "mecbend/gbd.hpp"
#include "mecbend/queuesim.hpp"
#include "test_support.hpp"

namespace {

using namespace mecbend;

Solution solved_desk(std::uint64_t seed, Instance& inst) {
  GeneratorConfig c = preset("desk");
  c.seed = seed;
  c.num_bs = 2;
  c.num_services = 3;
  c.full_mesh = true;
  inst = generate(c);
  return solve_gbd(inst).solution;
}

TEST(Mm1, TextbookMean) {
  const SampleStats st = simulate_mm1(1.0, 2.0, 100000, 5);
  EXPECT_NEAR(st.mean, 1.0, 3 * st.stderr_);
  EXPECT_GT(st.stderr_, 0.0);
  EXPECT_LT(st.stderr_, 0.05);
  EXPECT_THROW(simulate_mm1(2.0, 2.0, 1000, 1), ContractError);
}

TEST(Mm1, BatchMeans) {
  std::vector<double> v(40);
  for (int i = 0; i < 40; ++i) v[i] = i % 2;
  const SampleStats st = batch_means(v, 20);
  EXPECT_DOUBLE_EQ(st.mean, 0.5);
  EXPECT_DOUBLE_EQ(st.stderr_, 0.0);  // every batch is {0, 1}
  EXPECT_EQ(st.samples, 40);
  EXPECT_EQ(batch_means({}, 20).samples, 0);
}

TEST(Simulate, ZeroFlowOmitted) {
  Instance inst;
  const Solution sol = solved_desk(1, inst);
  const Dims d(inst);
  const SimReport rep = simulate(inst, sol, {20000, 1});
  for (const FlowStat& f : rep.flows) EXPECT_GT(sol.y[d.flow(f.s, f.e, f.n)], 0.0);
  // Nothing served: empty report.
  const SimReport none = simulate(inst, cloud_only(inst), {20000, 1});
  EXPECT_TRUE(none.flows.empty());
  for (const QueueStat& q : none.queues) EXPECT_EQ(q.sim.samples, 0);
}

TEST(Simulate, AgreesWithAnalyticDelays) {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    Instance inst;
    const Solution sol = solved_desk(seed, inst);
    SimOptions opt;
    opt.arrivals = 200000;
    opt.seed = seed;
    const SimReport rep = simulate(inst, sol, opt);
    for (const QueueStat& q : rep.queues) {
      if (q.kind != QueueStat::Kind::kServer || q.sim.samples == 0 || q.rho > 0.9) continue;
      ++checked;
      EXPECT_NEAR(q.sim.mean, q.analytic, std::max(0.05 * q.analytic, 3 * q.sim.stderr_))
          << q.id() << " seed " << seed;
    }
    for (const FlowStat& f : rep.flows)
      EXPECT_LE(f.sim.mean, f.max_delay + 3 * f.sim.stderr_);
    // 18 rate checks in all; 4.5 SE keeps the family-wise false alarm rate
    // near 1e-4. The z-scores are calibrated (variance ~1 over 40 seeds).
    for (const FlowStat& r : rep.routing)
      EXPECT_NEAR(r.sim.mean, r.analytic, 4.5 * r.sim.stderr_ + 1e-9);
  }
  EXPECT_GT(checked, 0);
}

TEST(Simulate, RefusesUnstable) {
  Instance inst;
  Solution sol = solved_desk(2, inst);
  const Dims d(inst);
  for (int f = 0; f < d.num_flows(); ++f)
    if (sol.y[f] > 0.0) {
      const int n = f % d.servers(), s = f / (d.E * d.servers());
      sol.u[d.x(n, s)] = 0.0;
      break;
    }
  EXPECT_THROW(simulate(inst, sol), ContractError);
}

TEST(Simulate, CsvAndDeterminism) {
  Instance inst;
  const Solution sol = solved_desk(1, inst);
  std::ostringstream a, b;
  write_sim_csv(a, simulate(inst, sol, {20000, 9}), "m");
  write_sim_csv(b, simulate(inst, sol, {20000, 9}), "m");
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().rfind("# manifest m\nqueue,analytic_ms,simulated_ms,stderr_ms,samples", 0), 0u);
}

}  // namespace
