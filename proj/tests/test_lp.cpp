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
#include <cmath>
#include <sstream>

#include "mecbend/lp.hpp"
#include "test_support.hpp"

namespace lp = mecbend::lp;

namespace {

// max 3x + 2y  s.t. x + y <= 4, x + 3y <= 7, x <= 3.  Optimum (3,1), value 11,
// duals (2, 0) on the two rows, reduced cost of x = 1 (at its upper bound).
TEST(Lp, TextbookMaximization) {
  lp::Problem p;
  p.add_column(3.0, 0.0, 3.0);
  p.add_column(2.0, 0.0, lp::kInf);
  p.add_row({{0, 1.0}, {1, 1.0}}, -lp::kInf, 4.0);
  p.add_row({{0, 1.0}, {1, 3.0}}, -lp::kInf, 7.0);
  const auto r = lp::solve(p);
  ASSERT_EQ(r.status, lp::Status::kOptimal);
  EXPECT_NEAR(r.objective, 11.0, 1e-12);
  EXPECT_NEAR(r.x[0], 3.0, 1e-12);
  EXPECT_NEAR(r.x[1], 1.0, 1e-12);
  EXPECT_NEAR(r.row_dual[0], 2.0, 1e-12);
  EXPECT_NEAR(r.row_dual[1], 0.0, 1e-12);
  EXPECT_NEAR(r.reduced_cost[0], 1.0, 1e-12);
  EXPECT_NEAR(r.reduced_cost[1], 0.0, 1e-12);
}

TEST(Lp, MinimizationWithLowerBoundedRows) {
  // min x + y  s.t. x + 2y >= 4, 3x + y >= 6.  Optimum (1.6, 1.2), value 2.8.
  lp::Problem p;
  p.maximize = false;
  p.add_column(1.0, 0.0, lp::kInf);
  p.add_column(1.0, 0.0, lp::kInf);
  p.add_row({{0, 1.0}, {1, 2.0}}, 4.0, lp::kInf);
  p.add_row({{0, 3.0}, {1, 1.0}}, 6.0, lp::kInf);
  const auto r = lp::solve(p);
  ASSERT_EQ(r.status, lp::Status::kOptimal);
  EXPECT_NEAR(r.objective, 2.8, 1e-12);
  // Duals: y1 + 3 y2 = 1, 2 y1 + y2 = 1  ->  y = (0.4, 0.2).
  EXPECT_NEAR(r.row_dual[0], 0.4, 1e-12);
  EXPECT_NEAR(r.row_dual[1], 0.2, 1e-12);
}

TEST(Lp, DetectsInfeasibility) {
  lp::Problem p;
  p.add_column(1.0, 0.0, 1.0);
  p.add_row({{0, 1.0}}, 2.0, lp::kInf);
  EXPECT_EQ(lp::solve(p).status, lp::Status::kInfeasible);
}

TEST(Lp, DetectsUnboundedness) {
  lp::Problem p;
  p.add_column(1.0, 0.0, lp::kInf);
  p.add_column(0.0, 0.0, lp::kInf);
  p.add_row({{0, 1.0}, {1, -1.0}}, -lp::kInf, 1.0);
  p.add_row({{0, 1.0}, {1, -2.0}}, -lp::kInf, 5.0);
  EXPECT_EQ(lp::solve(p).status, lp::Status::kUnbounded);
}

TEST(Lp, FreeColumnAndEqualityRow) {
  // max -t  s.t. t >= x - 2, t >= 2 - x, x = 5  ->  t = 3.
  lp::Problem p;
  const int t = p.add_column(-1.0, -lp::kInf, lp::kInf);
  const int x = p.add_column(0.0, -lp::kInf, lp::kInf);
  p.add_row({{t, 1.0}, {x, -1.0}}, -2.0, lp::kInf);
  p.add_row({{t, 1.0}, {x, 1.0}}, 2.0, lp::kInf);
  p.add_row({{x, 1.0}}, 5.0, 5.0);
  const auto r = lp::solve(p);
  ASSERT_EQ(r.status, lp::Status::kOptimal);
  EXPECT_NEAR(r.x[t], 3.0, 1e-12);
  EXPECT_NEAR(r.objective, -3.0, 1e-12);
}

TEST(Lp, NoRows) {
  lp::Problem p;
  p.add_column(2.0, -1.0, 4.0);
  p.add_column(-1.0, -3.0, 4.0);
  const auto r = lp::solve(p);
  ASSERT_EQ(r.status, lp::Status::kOptimal);
  EXPECT_DOUBLE_EQ(r.objective, 11.0);
}

TEST(Lp, BadlyScaledRowsStillSolve) {
  // Same geometry as the textbook problem with rows scaled by 1e9 and 1e-7.
  lp::Problem p;
  p.add_column(3.0e-6, 0.0, 3.0);
  p.add_column(2.0e-6, 0.0, lp::kInf);
  p.add_row({{0, 1e9}, {1, 1e9}}, -lp::kInf, 4e9);
  p.add_row({{0, 1e-7}, {1, 3e-7}}, -lp::kInf, 7e-7);
  const auto r = lp::solve(p);
  ASSERT_EQ(r.status, lp::Status::kOptimal);
  EXPECT_NEAR(r.objective, 11.0e-6, 1e-18);
  EXPECT_NEAR(r.row_dual[0], 2.0e-15, 1e-24);
}

TEST(Lp, WriteTextFormat) {
  lp::Problem p;
  p.add_column(1.5, 0.0, lp::kInf);
  p.add_row({{0, 2.0}}, -lp::kInf, 3.0);
  std::ostringstream os;
  lp::write_text(os, p);
  EXPECT_EQ(os.str(), "LP 1 1 max\nC 0 1.5 0 inf\nR 0 -inf 3 1 0 2\n");
}

// Random packing LPs: check primal feasibility, dual feasibility and a zero
// duality gap for every solve.
TEST(Lp, RandomPackingKkt) {
  mecbend::fixtures::Rng rng(20260101);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = 1 + static_cast<int>(rng.uniform() * 12);
    const int n = 1 + static_cast<int>(rng.uniform() * 15);
    lp::Problem p;
    for (int j = 0; j < n; ++j) p.add_column(rng.uniform(-1.0, 3.0), 0.0, lp::kInf);
    std::vector<double> b(m);
    for (int i = 0; i < m; ++i) {
      std::vector<lp::Term> terms;
      for (int j = 0; j < n; ++j)
        if (rng.uniform() < 0.6) terms.push_back({j, rng.uniform(0.01, 5.0)});
      b[i] = rng.uniform(0.0, 10.0);
      p.add_row(terms, -lp::kInf, b[i]);
    }
    // Every column needs to appear somewhere or it may be unbounded.
    std::vector<lp::Term> cap;
    for (int j = 0; j < n; ++j) cap.push_back({j, 1.0});
    p.add_row(cap, -lp::kInf, 20.0);
    const auto r = lp::solve(p);
    ASSERT_EQ(r.status, lp::Status::kOptimal) << "trial " << trial;
    double dual_obj = 20.0 * r.row_dual[m];
    for (int i = 0; i < m; ++i) dual_obj += b[i] * r.row_dual[i];
    EXPECT_NEAR(dual_obj, r.objective, 1e-9 * std::max(1.0, std::abs(r.objective)));
    for (int i = 0; i <= m; ++i) {
      EXPECT_GE(r.row_dual[i], -1e-12);
      EXPECT_LE(r.row_activity[i], p.rows[i].upper + 1e-9);
    }
    for (int j = 0; j < n; ++j) {
      EXPECT_GE(r.x[j], -1e-12);
      EXPECT_LE(r.reduced_cost[j], 1e-9);
    }
  }
}

// Equality-constrained transportation problems against a brute-force vertex
// oracle are too slow; instead compare against the same problem with rows
// permuted, which must give the same optimum.
TEST(Lp, RowPermutationInvariance) {
  mecbend::fixtures::Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 2 + static_cast<int>(rng.uniform() * 6);
    const int n = 2 + static_cast<int>(rng.uniform() * 8);
    lp::Problem p;
    for (int j = 0; j < n; ++j) p.add_column(rng.uniform(-2.0, 2.0), 0.0, rng.uniform(0.5, 3.0));
    for (int i = 0; i < m; ++i) {
      std::vector<lp::Term> terms;
      for (int j = 0; j < n; ++j) terms.push_back({j, rng.uniform(-1.0, 2.0)});
      const double lo = rng.uniform(-3.0, 0.0);
      p.add_row(terms, lo, lo + rng.uniform(0.0, 4.0));
    }
    lp::Problem q = p;
    std::reverse(q.rows.begin(), q.rows.end());
    const auto a = lp::solve(p);
    const auto b = lp::solve(q);
    ASSERT_EQ(a.status, b.status) << "trial " << trial;
    if (a.status == lp::Status::kOptimal) {
      EXPECT_NEAR(a.objective, b.objective, 1e-9 * std::max(1.0, std::abs(a.objective)));
    }
  }
}

// Repeated (row, column) entries add up.
TEST(Lp, DuplicateEntriesAreSummed) {
  lp::Problem p;
  p.add_column(1.0, 0.0, lp::kInf);
  p.add_row({{0, 1.0}, {0, 1.0}}, -lp::kInf, 4.0);  // 2x <= 4
  const auto r = lp::solve(p);
  ASSERT_EQ(r.status, lp::Status::kOptimal);
  EXPECT_NEAR(r.x[0], 2.0, 1e-12);
  EXPECT_NEAR(r.row_activity[0], 4.0, 1e-12);

  lp::Problem q;
  q.add_column(1.0, 0.0, 5.0);
  q.add_row({{0, 1.0}, {0, -1.0}}, -lp::kInf, 0.0);  // cancels to 0 <= 0
  const auto rq = lp::solve(q);
  ASSERT_EQ(rq.status, lp::Status::kOptimal);
  EXPECT_NEAR(rq.x[0], 5.0, 1e-12);
}

// Tightening bounds and resolving from the previous basis gives the same
// optimum as a cold solve.
TEST(Lp, WarmStartMatchesColdSolve) {
  mecbend::fixtures::Rng rng(4242);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 2 + rng.index(6);
    const int n = 2 + rng.index(8);
    lp::Problem p;
    for (int j = 0; j < n; ++j) p.add_column(rng.uniform(-1.0, 3.0), 0.0, 1.0);
    for (int i = 0; i < m; ++i) {
      std::vector<lp::Term> terms;
      for (int j = 0; j < n; ++j)
        if (rng.coin(0.7)) terms.push_back({j, rng.uniform(0.1, 2.0)});
      p.add_row(terms, -lp::kInf, rng.uniform(0.5, 3.0));
    }
    const auto root = lp::solve(p);
    ASSERT_EQ(root.status, lp::Status::kOptimal);
    std::vector<double> lo = p.col_lower, hi = p.col_upper;
    const int j = rng.index(n);
    if (rng.coin()) lo[j] = 1.0; else hi[j] = 0.0;
    const auto warm = lp::solve(p, lo, hi, {}, &root.basis);
    const auto cold = lp::solve(p, lo, hi);
    ASSERT_EQ(warm.status, cold.status) << "trial " << trial;
    if (cold.status == lp::Status::kOptimal) {
      EXPECT_NEAR(warm.objective, cold.objective, 1e-9 * std::max(1.0, std::abs(cold.objective)));
    }
  }
}

// Two identical columns both basic: the starting basis is singular and the
// solver has to fall back to the slack basis.
TEST(Lp, SingularWarmStartFallsBack) {
  lp::Problem p;
  p.add_column(1.0, 0.0, 4.0);
  p.add_column(1.0, 0.0, 4.0);
  p.add_row({{0, 1.0}, {1, 1.0}}, -lp::kInf, 3.0);
  p.add_row({{0, 2.0}, {1, 2.0}}, -lp::kInf, 8.0);
  lp::Basis bad;
  bad.head = {0, 1};
  bad.at_upper.assign(4, 0);
  const auto r = lp::solve(p, p.col_lower, p.col_upper, {}, &bad);
  ASSERT_EQ(r.status, lp::Status::kOptimal);
  EXPECT_NEAR(r.objective, 3.0, 1e-12);
  for (double v : r.x) EXPECT_TRUE(std::isfinite(v));
}

}  // namespace
