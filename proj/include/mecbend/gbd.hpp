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

// Generalized Benders loop.
//
//   (X^, Z^) <- cloud-only placement, Z = 0;  LB = -inf, UB = +inf
//   repeat
//     solve the inner problem at (X^, Z^)
//     optimal:    v = f - P_str(X^); LB = max(LB, v); stop if v >= UB - eps;
//                 add an optimality cut
//     infeasible: solve the feasibility program, add a feasibility cut
//     solve the relaxed master -> UB, (X^, Z^); stop if UB - LB <= eps
//
// The master discards nodes whose bound is at most LB + eps. When nothing
// survives, UB drops to the largest discarded bound and the loop stops.
//
// Bounds are both expressed over profit including storage cost. The default
// tolerance is eps = 1e-4 * max(1, |first LB|).

#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "mecbend/cuts.hpp"
#include "mecbend/formulation.hpp"
#include "mecbend/master.hpp"
#include "mecbend/subproblems.hpp"

namespace mecbend {

enum class GbdStatus { kConverged, kIterationLimit, kInfeasible };

inline const char* to_string(GbdStatus s) {
  switch (s) {
    case GbdStatus::kConverged: return "converged";
    case GbdStatus::kIterationLimit: return "iteration_limit";
    case GbdStatus::kInfeasible: return "infeasible";
  }
  return "unknown";
}

struct TraceRow {
  int iter = 0;
  double lb = -kInf;
  double ub = kInf;
  InnerStatus inner_status = InnerStatus::kOptimal;
  std::optional<CutKind> cut_kind;  // empty when the loop stopped before adding a cut
  int tau_feas = 0;
  int tau_infeas = 0;
  long master_nodes = 0;
  double wall_ms = 0.0;

  double gap() const { return ub - lb; }
};

struct GbdOptions {
  std::vector<std::uint8_t> flow_mask;  // empty: every presolve-allowed flow
  bool record_timing = true;            // false writes wall_ms = 0
  MasterOptions master;
};

struct GbdResult {
  GbdStatus status = GbdStatus::kIterationLimit;
  Solution solution;
  double lb = -kInf;
  double ub = kInf;
  double epsilon = 0.0;
  int iterations = 0;
  std::vector<TraceRow> trace;
  std::vector<Cut> cuts;
};

inline GbdResult solve_gbd(const Instance& inst, const GbdOptions& opt = {}) {
  using clock = std::chrono::steady_clock;
  InnerSolver inner(inst);
  Master master(inst, opt.flow_mask, opt.master);
  const GSystem& g = inner.system();

  GbdResult res;
  res.solution = cloud_only(inst);
  std::vector<std::uint8_t> x = res.solution.x;
  std::vector<std::uint8_t> z(Dims(inst).num_flows(), 0);
  std::optional<double> eps = inst.params.epsilon;
  std::set<std::vector<std::uint8_t>> infeasible_points;
  int tau_feas = 0, tau_infeas = 0;
  const auto start = clock::now();

  for (int iter = 1; iter <= inst.params.max_iterations; ++iter) {
    res.iterations = iter;
    TraceRow row;
    row.iter = iter;
    const InnerResult r = inner.solve_inner(x, z);
    row.inner_status = r.status;
    bool stop = false;
    if (r.status == InnerStatus::kOptimal) {
      const double value = r.objective - storage_cost(inst, x);
      if (!eps) eps = 1e-4 * std::max(1.0, std::abs(value));
      if (value > res.lb) {
        res.lb = value;
        res.solution = Solution{x, z, r.y, r.u};
      }
      if (value >= res.ub - *eps) {
        stop = true;
      } else {
        res.cuts.push_back(make_optimality_cut(inst, g, x, z, r, iter));
        row.cut_kind = CutKind::kOptimality;
        ++tau_feas;
      }
    } else {
      std::vector<std::uint8_t> key = x;
      key.insert(key.end(), z.begin(), z.end());
      if (!infeasible_points.insert(key).second)
        throw NumericalError("master revisited a point already cut off as infeasible");
      const FeasibilityResult fr = inner.solve_feasibility(x, z);
      res.cuts.push_back(make_feasibility_cut(inst, g, x, z, fr, iter));
      row.cut_kind = CutKind::kFeasibility;
      ++tau_infeas;
    }

    if (!stop) {
      // Only points that could beat the incumbent by more than eps matter.
      const double cutoff = res.lb > -kInf ? res.lb + *eps : -kInf;
      const MasterResult m = master.solve(res.cuts, cutoff);
      row.master_nodes = m.node_count;
      if (m.status == MasterStatus::kInfeasible) {
        res.status = GbdStatus::kInfeasible;
        row.lb = res.lb;
        row.ub = res.ub;
        row.tau_feas = tau_feas;
        row.tau_infeas = tau_infeas;
        res.trace.push_back(row);
        break;
      }
      if (m.status == MasterStatus::kBelowCutoff) {
        res.ub = std::min(res.ub, std::max(m.ub, res.lb));
        stop = true;
      } else {
        res.ub = std::min(res.ub, m.ub);
        x = m.x;
        z = m.z;
      }
      if (res.ub - res.lb <= *eps) stop = true;
    }

    row.lb = res.lb;
    row.ub = res.ub;
    row.tau_feas = tau_feas;
    row.tau_infeas = tau_infeas;
    if (opt.record_timing)
      row.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
    res.trace.push_back(row);
    if (stop) {
      res.status = GbdStatus::kConverged;
      break;
    }
  }
  res.epsilon = eps.value_or(0.0);
  return res;
}

// CSV trace; `manifest` (when non-empty) is written as a leading comment.
inline void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace,
                            const std::string& manifest = {}) {
  if (!manifest.empty()) os << "# manifest " << manifest << '\n';
  os << "iter,lb,ub,gap,inner_status,cut_kind,wall_ms\n";
  os << std::setprecision(17);
  for (const TraceRow& r : trace) {
    os << r.iter << ',' << r.lb << ',' << r.ub << ',' << r.gap() << ','
       << to_string(r.inner_status) << ','
       << (r.cut_kind ? to_string(*r.cut_kind) : "none") << ',' << r.wall_ms << '\n';
  }
}

}  // namespace mecbend
