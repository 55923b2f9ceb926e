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

// Relaxed master problem: a binary program over (X, Z) with a free UB column,
//
//   max UB
//   s.t. UB <= cut_k(X, Z)          optimality cuts
//        0  <= cut_k(X, Z)          feasibility cuts
//        sum_s sigma_s x_es <= C_e
//        z_sen <= x_ns              (BS servers; x_cs = 1 is folded in)
//        z_sen = 0                  outside the allowed-flow mask
//
// solved by LP-based branch and bound with best-bound node selection and
// most-fractional branching (ties to the lowest column index). Column order
// is x (BS rows of X) followed by the free z, then UB.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <memory>
#include <queue>
#include <string>
#include <vector>

#include "mecbend/cuts.hpp"
#include "mecbend/formulation.hpp"
#include "mecbend/lp.hpp"
#include "mecbend/model.hpp"

namespace mecbend {

// kBelowCutoff: no master-feasible point has a value above the cutoff; `ub`
// then holds the largest bound seen, which is still a valid upper bound.
enum class MasterStatus { kOptimal, kInfeasible, kBelowCutoff };

// kMostFractional: largest min(v, 1 - v), lowest column on ties.
// kReliability: product score of the estimated bound drops of the two
// children. Estimates come from strong branching (both child LPs solved) until
// a column has `reliability` observations per side, then from pseudocosts.
// Candidates are scanned in most-fractional order; ties go to the lowest
// column.
enum class Branching { kMostFractional, kReliability };

struct MasterOptions {
  Branching branching = Branching::kReliability;
  int strong_candidates = 8;  // strong-branching LP pairs per node, at most
  int reliability = 2;
  double rel_gap = 1e-9;
  double abs_gap = 1e-11;
  double integrality_tol = 1e-7;
  long max_nodes = 5'000'000;
  std::ostream* node_log = nullptr;  // CSV: node,parent,depth,bound,status,branch_col
};

struct MasterResult {
  MasterStatus status = MasterStatus::kInfeasible;
  double ub = -kInf;
  std::vector<std::uint8_t> x;
  std::vector<std::uint8_t> z;
  long node_count = 0;
};

inline std::vector<std::uint8_t> presolve_mask(const Instance& inst) {
  const Dims d(inst);
  std::vector<std::uint8_t> mask(d.num_flows(), 0);
  for (int s = 0; s < d.S; ++s)
    for (int e = 0; e < d.E; ++e)
      for (int n = 0; n < d.servers(); ++n) mask[d.flow(s, e, n)] = flow_allowed(inst, s, e, n);
  return mask;
}

class Master {
 public:
  // `mask` restricts the flows that may open; it is intersected with the
  // presolve fixings.
  Master(const Instance& inst, std::vector<std::uint8_t> mask = {}, MasterOptions opt = {})
      : inst_(inst), d_(inst), opt_(opt) {
    allowed_ = presolve_mask(inst);
    if (!mask.empty()) {
      if (static_cast<int>(mask.size()) != d_.num_flows()) throw IndexError("flow mask size");
      for (int f = 0; f < d_.num_flows(); ++f) allowed_[f] = allowed_[f] && mask[f];
    }
    x_col_.assign(d_.num_x(), -1);
    z_col_.assign(d_.num_flows(), -1);
    for (int n = 0; n < d_.E; ++n)
      for (int s = 0; s < d_.S; ++s) {
        x_col_[d_.x(n, s)] = base_.add_column(0.0, 0.0, 1.0);
        col_kind_.push_back(d_.x(n, s));
      }
    for (int f = 0; f < d_.num_flows(); ++f)
      if (allowed_[f]) {
        z_col_[f] = base_.add_column(0.0, 0.0, 1.0);
        col_kind_.push_back(d_.num_x() + f);
      }
    ub_col_ = base_.add_column(1.0, -kInf, kInf);
    for (int e = 0; e < d_.E; ++e) {
      std::vector<lp::Term> t;
      for (int s = 0; s < d_.S; ++s) t.push_back({x_col_[d_.x(e, s)], inst.services[s].size});
      base_.add_row(std::move(t), -kInf, inst.topology.storage[e]);
    }
    for (int s = 0; s < d_.S; ++s)
      for (int e = 0; e < d_.E; ++e)
        for (int n = 0; n < d_.E; ++n) {
          const int f = d_.flow(s, e, n);
          if (z_col_[f] < 0) continue;
          base_.add_row({{z_col_[f], 1.0}, {x_col_[d_.x(n, s)], -1.0}}, -kInf, 0.0);
        }
  }

  const std::vector<std::uint8_t>& allowed() const { return allowed_; }

  // Nodes whose bound does not exceed `cutoff` are discarded. Nodes within
  // `tolerance` of the incumbent are discarded too; the returned `ub` is then
  // the largest discarded bound, so it stays a valid upper bound.
  MasterResult solve(const std::vector<Cut>& cuts, double cutoff = -kInf,
                     double tolerance = 0.0) const {
    tolerance_ = tolerance;
    bool any_opt = false;
    for (const Cut& c : cuts) any_opt = any_opt || c.kind == CutKind::kOptimality;
    if (!any_opt) throw ContractError("master needs at least one optimality cut");

    lp::Problem p = base_;
    for (const Cut& c : cuts) add_cut_row(p, c);

    lp::Options lpo;
    lpo.feasibility_tol = 1e-9;
    lpo.optimality_tol = 1e-10;

    MasterResult best;
    best.status = MasterStatus::kInfeasible;
    double incumbent = -kInf;
    std::vector<std::uint8_t> inc_x, inc_z;

    // Seed with the cloud-only point when it satisfies every cut.
    {
      std::vector<std::uint8_t> x0 = cloud_only(inst_).x;
      std::vector<std::uint8_t> z0(d_.num_flows(), 0);
      double val;
      if (evaluate_point(cuts, x0, z0, val) && val > cutoff) {
        incumbent = val;
        inc_x = x0;
        inc_z = z0;
      }
    }

    struct Node {
      long id;
      long parent;
      int depth;
      double bound;
      std::vector<std::pair<int, std::uint8_t>> fix;
      std::shared_ptr<const lp::Basis> start;  // parent's optimal basis
      int branch_col = -1;                      // last fixing, for pseudocosts
      int branch_dir = 0;
      double branch_dist = 0.0;
      double parent_obj = 0.0;
    };
    auto worse = [](const Node& a, const Node& b) {
      if (a.bound != b.bound) return a.bound < b.bound;
      return a.id > b.id;
    };
    std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);
    open.push(Node{0, -1, 0, kInf, {}, root_start(p), -1, 0, 0.0, 0.0});
    pseudo_.resize(ub_col_);
    long next_id = 1;
    long nodes = 0;
    if (opt_.node_log) *opt_.node_log << "node,parent,depth,bound,status,branch_col\n";

    lp::Solver solver(p, lpo);
    std::vector<double> lo(p.col_lower), hi(p.col_upper);
    double max_discarded = -kInf;
    auto discard = [&](double bound) {
      if (bound <= incumbent + gap(incumbent) || bound <= cutoff) {
        max_discarded = std::max(max_discarded, bound);
        return true;
      }
      return false;
    };
    while (!open.empty()) {
      Node node = open.top();
      open.pop();
      if (discard(node.bound)) continue;
      if (++nodes > opt_.max_nodes) throw NumericalError("master node limit reached");
      lo = p.col_lower;
      hi = p.col_upper;
      for (auto [c, v] : node.fix) lo[c] = hi[c] = v;
      lp::Result r = solver.solve(lo, hi, node.start.get());
      if (node.id == 0 && r.status == lp::Status::kOptimal) root_basis_ = r.basis;
      const auto basis = std::make_shared<const lp::Basis>(std::move(r.basis));
      auto log = [&](const char* status, int col, double bound) {
        if (opt_.node_log)
          *opt_.node_log << node.id << ',' << node.parent << ',' << node.depth << ','
                         << bound << ',' << status << ',' << col << '\n';
      };
      if (r.status == lp::Status::kInfeasible) {
        log("infeasible", -1, -kInf);
        continue;
      }
      if (node.branch_col >= 0 && r.status == lp::Status::kOptimal)
        pseudo_[node.branch_col].add(node.branch_dir,
                                     (node.parent_obj - r.objective) / node.branch_dist);
      if (r.status != lp::Status::kOptimal)
        throw NumericalError(std::string("master LP failed: ") + lp::to_string(r.status));
      const double bound = std::min(node.bound, r.objective);
      if (discard(bound)) {
        log("pruned", -1, bound);
        continue;
      }
      std::vector<std::pair<double, int>> cands;  // (-fractionality, column)
      for (int c = 0; c < ub_col_; ++c) {
        const double v = r.x[c];
        const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
        if (frac > opt_.integrality_tol) cands.emplace_back(-frac, c);
      }
      std::sort(cands.begin(), cands.end());
      int branch = cands.empty() ? -1 : cands.front().second;
      double child_obj[2] = {kInf, kInf};  // strong-branching bounds (down, up)
      if (branch >= 0 && opt_.branching == Branching::kReliability) {
        double best_score = -1.0;
        int strong_left = opt_.strong_candidates;
        for (const auto& [negfrac, c] : cands) {
          const double f = r.x[c] - std::floor(r.x[c]);
          const double dist[2] = {f, 1.0 - f};
          double drop[2];
          double obj[2] = {kInf, kInf};
          const bool strong = pseudo_[c].unreliable(opt_.reliability) && strong_left > 0;
          if (strong) {
            --strong_left;
            for (int dir = 0; dir < 2; ++dir) {
              std::vector<double> l2 = lo, h2 = hi;
              l2[c] = h2[c] = dir;
              const lp::Result sr = solver.solve(l2, h2, basis.get());
              if (sr.status == lp::Status::kOptimal) {
                obj[dir] = sr.objective;
                drop[dir] = std::max(0.0, r.objective - sr.objective);
                pseudo_[c].add(dir, drop[dir] / dist[dir]);
              } else if (sr.status == lp::Status::kInfeasible) {
                obj[dir] = -kInf;
                drop[dir] = kInf;
              } else {
                drop[dir] = 0.0;
              }
            }
          } else {
            for (int dir = 0; dir < 2; ++dir) drop[dir] = pseudo_estimate(c, dir) * dist[dir];
          }
          const double score = std::min(1e300, std::max(drop[0], 1e-15) * std::max(drop[1], 1e-15));
          if (score > best_score * (1.0 + 1e-9) || (score >= best_score && c < branch)) {
            best_score = score;
            branch = c;
            child_obj[0] = obj[0];
            child_obj[1] = obj[1];
          }
        }
      }
      if (branch < 0) {
        std::vector<std::uint8_t> x, z;
        round_point(r.x, x, z);
        double val;
        const bool ok = evaluate_point(cuts, x, z, val);
        if (ok && val > incumbent && val > cutoff) {
          incumbent = val;
          inc_x = std::move(x);
          inc_z = std::move(z);
          log("integral", -1, val);
        } else {
          if (ok) max_discarded = std::max(max_discarded, val);
          log("rejected", -1, bound);
        }
        continue;
      }
      log("branched", branch, bound);
      // Reduced-cost fixing: moving a nonbasic binary off its bound lowers
      // the bound by at least |d|; if that reaches the threshold the subtree
      // keeps it where it is.
      std::vector<std::pair<int, std::uint8_t>> fix = node.fix;
      const double threshold = std::max(incumbent + gap(incumbent), cutoff) - opt_.abs_gap;
      for (int c = 0; c < ub_col_; ++c) {
        if (lo[c] == hi[c]) continue;
        const double d = r.reduced_cost[c];
        if (r.x[c] <= opt_.integrality_tol && d < 0.0 && bound + d <= threshold) {
          fix.emplace_back(c, 0);
          max_discarded = std::max(max_discarded, bound + d);
        } else if (r.x[c] >= 1.0 - opt_.integrality_tol && d > 0.0 && bound - d <= threshold) {
          fix.emplace_back(c, 1);
          max_discarded = std::max(max_discarded, bound - d);
        }
      }
      const double f = r.x[branch] - std::floor(r.x[branch]);
      for (std::uint8_t v : {std::uint8_t{1}, std::uint8_t{0}}) {
        const double cb = std::min(bound, child_obj[v]);
        if (cb == -kInf) continue;
        Node child{next_id++, node.id, node.depth + 1, cb, fix, basis,
                   branch, v, v ? 1.0 - f : f, r.objective};
        child.fix.emplace_back(branch, v);
        open.push(std::move(child));
      }
    }

    best.node_count = nodes;
    if (incumbent == -kInf) {
      if (cutoff > -kInf) {
        best.status = MasterStatus::kBelowCutoff;
        best.ub = max_discarded;
      }
      return best;
    }
    best.status = MasterStatus::kOptimal;
    best.ub = std::max(incumbent, max_discarded);
    best.x = std::move(inc_x);
    best.z = std::move(inc_z);
    return best;
  }

 private:
  double gap(double incumbent) const {
    if (!std::isfinite(incumbent)) return 0.0;
    return std::max({opt_.abs_gap, opt_.rel_gap * std::abs(incumbent), tolerance_});
  }

  // Previous root basis extended with the logicals of rows added since.
  std::shared_ptr<const lp::Basis> root_start(const lp::Problem& p) const {
    const int m = p.num_rows(), n = p.num_cols();
    const int old_m = static_cast<int>(root_basis_.head.size());
    if (root_basis_.empty() || old_m > m) return nullptr;
    auto b = std::make_shared<lp::Basis>(root_basis_);
    for (int i = old_m; i < m; ++i) b->head.push_back(n + i);
    b->at_upper.resize(n + m, 0);
    return b;
  }

  // Fixed-column contributions (cloud placements) go into the row bound.
  void add_cut_row(lp::Problem& p, const Cut& c) const {
    std::vector<lp::Term> t;
    double constant = c.constant;
    for (const auto& [i, coef] : c.coeff_x) {
      const int n = i / d_.S;
      if (n == d_.cloud()) constant += coef;
      else t.push_back({x_col_[i], coef});
    }
    for (const auto& [f, coef] : c.coeff_z)
      if (z_col_[f] >= 0) t.push_back({z_col_[f], coef});
    if (c.kind == CutKind::kOptimality) {
      // UB - terms <= constant
      for (auto& term : t) term.coef = -term.coef;
      t.push_back({ub_col_, 1.0});
      p.add_row(std::move(t), -kInf, constant);
    } else {
      p.add_row(std::move(t), -constant, kInf);
    }
  }

  void round_point(const std::vector<double>& v, std::vector<std::uint8_t>& x,
                   std::vector<std::uint8_t>& z) const {
    x = cloud_only(inst_).x;
    z.assign(d_.num_flows(), 0);
    for (int i = 0; i < d_.num_x(); ++i)
      if (x_col_[i] >= 0) x[i] = v[x_col_[i]] > 0.5;
    for (int f = 0; f < d_.num_flows(); ++f)
      if (z_col_[f] >= 0) z[f] = v[z_col_[f]] > 0.5;
  }

  // Exact check of the side constraints and cuts at a binary point; on
  // success `value` is the minimum over the optimality cuts.
  bool evaluate_point(const std::vector<Cut>& cuts, const std::vector<std::uint8_t>& x,
                      const std::vector<std::uint8_t>& z, double& value) const {
    for (int e = 0; e < d_.E; ++e) {
      double used = 0.0;
      for (int s = 0; s < d_.S; ++s)
        if (x[d_.x(e, s)]) used += inst_.services[s].size;
      if (used > inst_.topology.storage[e]) return false;
    }
    for (int s = 0; s < d_.S; ++s)
      for (int e = 0; e < d_.E; ++e)
        for (int n = 0; n < d_.servers(); ++n) {
          const int f = d_.flow(s, e, n);
          if (z[f] && (!allowed_[f] || !x[d_.x(n, s)])) return false;
        }
    value = kInf;
    for (const Cut& c : cuts) {
      const double v = c.evaluate(x, z);
      if (c.kind == CutKind::kOptimality) {
        value = std::min(value, v);
      } else {
        double scale = std::abs(c.constant);
        for (const auto& [i, coef] : c.coeff_z) scale = std::max(scale, std::abs(coef));
        if (v < -1e-9 * std::max(1.0, scale)) return false;
      }
    }
    return true;
  }

  const Instance& inst_;
  Dims d_;
  MasterOptions opt_;
  std::vector<std::uint8_t> allowed_;
  lp::Problem base_;
  std::vector<int> x_col_, z_col_;
  std::vector<int> col_kind_;
  int ub_col_ = -1;
  // Per-column average bound drop per unit change, for each direction.
  struct Pseudo {
    double sum[2] = {0.0, 0.0};
    int n[2] = {0, 0};
    void add(int dir, double v) {
      if (!std::isfinite(v)) return;
      sum[dir] += std::max(0.0, v);
      ++n[dir];
    }
    bool unreliable(int reliability) const { return std::min(n[0], n[1]) < reliability; }
  };

  double pseudo_estimate(int c, int dir) const {
    const Pseudo& ps = pseudo_[c];
    if (ps.n[dir] > 0) return ps.sum[dir] / ps.n[dir];
    double s = 0.0;
    int k = 0;
    for (const Pseudo& q : pseudo_)
      if (q.n[dir] > 0) {
        s += q.sum[dir] / q.n[dir];
        ++k;
      }
    return k ? s / k : 1.0;
  }

  mutable lp::Basis root_basis_;
  mutable std::vector<Pseudo> pseudo_;
  mutable double tolerance_ = 0.0;
};

inline MasterResult solve_master(const Instance& inst, const std::vector<Cut>& cuts,
                                 const MasterOptions& opt = {}) {
  return Master(inst, {}, opt).solve(cuts);
}

}  // namespace mecbend
