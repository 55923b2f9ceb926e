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

// Dense revised simplex for small and medium linear programs.
//
//   optimize  c^T x
//   s.t.      row_lo <= A x <= row_hi
//             col_lo <=  x  <= col_hi
//
// Every row i is given a logical variable r_i = a_i^T x that carries the row
// bounds, so the working system is [A  -I] (x, r) = 0 with bounds on all
// variables. The basis inverse is kept explicitly (column-major) and updated
// by product-form pivots; it is rebuilt from an LU factorization every
// `refactor_interval` pivots and before the final optimality check.
//
// Phase 1 minimizes the sum of bound violations of the basic variables
// (composite objective). Pricing is Dantzig's rule on the equilibrated
// problem, switching to Bland's rule after a run of degenerate pivots. All
// tie breaks are by index, so results are bit-for-bit reproducible.
//
// Dual convention: `row_dual` is y in  c - A^T y = d  for the caller's
// objective sense. For a maximization a row that is tight at its upper bound
// has y >= 0, a row tight at its lower bound has y <= 0.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mecbend::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// kNumerical: the basis became too ill-conditioned to trust the result.
enum class Status { kOptimal, kInfeasible, kUnbounded, kIterationLimit, kNumerical };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::kOptimal: return "optimal";
    case Status::kInfeasible: return "infeasible";
    case Status::kUnbounded: return "unbounded";
    case Status::kIterationLimit: return "iteration_limit";
    case Status::kNumerical: return "numerical";
  }
  return "unknown";
}

struct Term {
  int col;
  double coef;
};

struct Row {
  std::vector<Term> terms;
  double lower = -kInf;
  double upper = kInf;
};

struct Problem {
  bool maximize = true;
  std::vector<double> objective;
  std::vector<double> col_lower;
  std::vector<double> col_upper;
  std::vector<Row> rows;

  int num_cols() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  int add_column(double obj, double lower, double upper) {
    objective.push_back(obj);
    col_lower.push_back(lower);
    col_upper.push_back(upper);
    return num_cols() - 1;
  }

  int add_row(std::vector<Term> terms, double lower, double upper) {
    rows.push_back(Row{std::move(terms), lower, upper});
    return num_rows() - 1;
  }
};

struct Options {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-10;
  int max_iterations = 500000;
  int refactor_interval = 100;
  int degenerate_run_before_bland = 40;
};

// Basis of the internal working system: one basic variable per row (columns
// are 0..n-1, row logicals n..n+m-1) and the bound each nonbasic sits at.
struct Basis {
  std::vector<int> head;
  std::vector<std::uint8_t> at_upper;

  bool empty() const { return head.empty(); }
};

struct Result {
  Status status = Status::kIterationLimit;
  double objective = 0.0;
  std::vector<double> x;
  std::vector<double> row_activity;
  std::vector<double> row_dual;
  std::vector<double> reduced_cost;
  int iterations = 0;
  Basis basis;  // final basis, usable as a warm start for the same rows
};

namespace detail {

inline double pow2_round(double v) {
  if (!(v > 0.0) || !std::isfinite(v)) return 1.0;
  return std::ldexp(1.0, static_cast<int>(std::lround(std::log2(v))));
}

class Simplex {
 public:
  Simplex(const Problem& p, const Options& opt) : prob_(p), opt_(opt) {
    m_ = p.num_rows();
    n_ = p.num_cols();
    total_ = n_ + m_;
    build_scaled();
  }

  // A warm start that ends in non-finite values is retried from the slack
  // basis.
  Result run(const std::vector<double>& col_lower, const std::vector<double>& col_upper,
             const Basis* start = nullptr) {
    Result res = run_from(col_lower, col_upper, start);
    if (finite(res)) return res;
    if (start && !start->empty()) {
      res = run_from(col_lower, col_upper, nullptr);
      if (finite(res)) return res;
    }
    res.status = Status::kNumerical;
    return res;
  }

 private:
  static bool finite(const Result& r) {
    if (r.status == Status::kOptimal && !std::isfinite(r.objective)) return false;
    for (double v : r.x)
      if (!std::isfinite(v)) return false;
    return true;
  }

  Result run_from(const std::vector<double>& col_lower, const std::vector<double>& col_upper,
                  const Basis* start) {
    if (static_cast<int>(col_lower.size()) != n_ || static_cast<int>(col_upper.size()) != n_)
      throw std::invalid_argument("column bound vectors do not match the problem");
    col_lower_ = &col_lower;
    col_upper_ = &col_upper;
    for (int j = 0; j < n_; ++j) {
      lb_[j] = col_lower[j] / col_scale_[j];
      ub_[j] = col_upper[j] / col_scale_[j];
    }
    iterations_ = 0;
    Result res;
    if (start && !start->empty() && static_cast<int>(start->head.size()) == m_ &&
        static_cast<int>(start->at_upper.size()) == total_) {
      warm_basis(*start);
    } else {
      init_basis();
    }
    int final_checks = 0;
    int degenerate_run = 0;
    bool bland = false;
    int since_refactor = 0;
    bool was_phase2 = false;
    int regressions = 0;
    relax_ = 1.0;
    std::vector<double> cb(m_), pi(m_), alpha(m_);

    while (true) {
      if (iterations_ >= opt_.max_iterations) {
        res.status = Status::kIterationLimit;
        break;
      }
      if (since_refactor >= opt_.refactor_interval) {
        refactor();
        compute_basics();
        since_refactor = 0;
      }

      const bool phase1 = primal_infeasibility() > 0.0;
      // Rounding can push a basic variable just past its bound after phase 2
      // has started, and the two phases may then undo each other. Repeated
      // regressions widen the feasibility tolerance.
      if (phase1 && was_phase2 && ++regressions >= 5 && relax_ < 1e4) {
        relax_ *= 10.0;
        regressions = 0;
        continue;
      }
      was_phase2 = !phase1;
      for (int r = 0; r < m_; ++r) {
        const int j = head_[r];
        if (phase1) {
          if (x_[j] < lb_[j] - ftol(j, lb_[j])) cb[r] = 1.0;
          else if (x_[j] > ub_[j] + ftol(j, ub_[j])) cb[r] = -1.0;
          else cb[r] = 0.0;
        } else {
          cb[r] = cost_[j];
        }
      }
      for (int k = 0; k < m_; ++k) pi[k] = binv_.col(k).dot(Eigen::Map<const Eigen::VectorXd>(cb.data(), m_));

      // Pricing.
      int enter = -1;
      int dir = 0;
      double best = 0.0;
      for (int j = 0; j < total_; ++j) {
        if (pos_[j] >= 0) continue;
        if (lb_[j] == ub_[j]) continue;
        const double d = (phase1 ? 0.0 : cost_[j]) - column_dot(j, pi);
        int cand_dir = 0;
        const bool at_lower = !at_upper_[j] && std::isfinite(lb_[j]);
        const bool at_upper = at_upper_[j] && std::isfinite(ub_[j]);
        if (at_lower) {
          if (d > opt_.optimality_tol) cand_dir = 1;
        } else if (at_upper) {
          if (d < -opt_.optimality_tol) cand_dir = -1;
        } else {  // free nonbasic
          if (d > opt_.optimality_tol) cand_dir = 1;
          else if (d < -opt_.optimality_tol) cand_dir = -1;
        }
        if (cand_dir == 0) continue;
        if (bland) {
          enter = j;
          dir = cand_dir;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          enter = j;
          dir = cand_dir;
        }
      }

      if (enter < 0) {
        if (phase1) {
          res.status = Status::kInfeasible;
          break;
        }
        // Candidate optimum: rebuild the factorization and re-verify once or
        // twice before accepting.
        if (since_refactor > 0 && final_checks < 3) {
          ++final_checks;
          refactor();
          compute_basics();
          since_refactor = 0;
          continue;
        }
        res.status = Status::kOptimal;
        break;
      }

      column_ftran(enter, alpha);

      // Ratio test.
      int leave = -1;
      double theta = kInf;
      double leave_bound = 0.0;
      double best_pivot = 0.0;
      for (int r = 0; r < m_; ++r) {
        const double a = alpha[r];
        if (std::abs(a) <= opt_.pivot_tol) continue;
        const double delta = -dir * a;
        const int j = head_[r];
        double bound;
        if (delta < 0.0) {
          if (phase1 && x_[j] > ub_[j] + ftol(j, ub_[j])) bound = ub_[j];
          else if (phase1 && x_[j] < lb_[j] - ftol(j, lb_[j])) continue;
          else bound = lb_[j];
          if (!std::isfinite(bound)) continue;
        } else {
          if (phase1 && x_[j] < lb_[j] - ftol(j, lb_[j])) bound = lb_[j];
          else if (phase1 && x_[j] > ub_[j] + ftol(j, ub_[j])) continue;
          else bound = ub_[j];
          if (!std::isfinite(bound)) continue;
        }
        double t = (bound - x_[j]) / delta;
        if (t < 0.0) t = 0.0;
        const double tie = 1e-12 * std::max(1.0, std::abs(theta));
        bool take = false;
        if (t < theta - tie) {
          take = true;
        } else if (t <= theta + tie) {
          if (bland) take = j < head_[leave];
          else take = std::abs(a) > best_pivot;
        }
        if (take) {
          theta = t;
          leave = r;
          leave_bound = bound;
          best_pivot = std::abs(a);
        }
      }
      const double flip = ub_[enter] - lb_[enter];
      const bool bound_flip = std::isfinite(flip) && flip <= theta;
      if (!bound_flip && leave < 0) {
        if (phase1) {
          // Cannot happen with a consistent phase-1 cost; treat as numerical.
          res.status = Status::kIterationLimit;
        } else {
          res.status = Status::kUnbounded;
        }
        break;
      }

      ++iterations_;
      ++since_refactor;
      const double step = bound_flip ? flip : theta;
      if (step <= 1e-12) {
        if (++degenerate_run > opt_.degenerate_run_before_bland) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }

      x_[enter] += dir * step;
      for (int r = 0; r < m_; ++r) x_[head_[r]] += -dir * alpha[r] * step;

      if (bound_flip) {
        at_upper_[enter] = dir > 0;
        x_[enter] = dir > 0 ? ub_[enter] : lb_[enter];
        continue;
      }

      const int out = head_[leave];
      x_[out] = leave_bound;
      at_upper_[out] = (leave_bound == ub_[out]) && leave_bound != lb_[out];
      pos_[out] = -1;
      head_[leave] = enter;
      pos_[enter] = leave;
      pivot(leave, alpha);
    }

    res.iterations = iterations_;
    res.basis.head = head_;
    res.basis.at_upper.assign(at_upper_.begin(), at_upper_.end());
    if (res.status == Status::kOptimal || res.status == Status::kUnbounded ||
        res.status == Status::kIterationLimit || res.status == Status::kInfeasible) {
      extract(res, pi);
    }
    return res;
  }

 private:
  // Column tolerances apply to the unscaled value, row tolerances to the
  // equilibrated row.
  double ftol(int j, double bound) const {
    if (j < n_) {
      const double cs = col_scale_[j];
      return relax_ * opt_.feasibility_tol * std::max(1.0, std::abs(bound * cs) * 1e-3) / cs;
    }
    return relax_ * opt_.feasibility_tol * std::max(1.0, std::abs(bound) * 1e-3);
  }

  void build_scaled() {
    cols_.assign(n_, {});
    for (int i = 0; i < m_; ++i)
      for (const Term& t : prob_.rows[i].terms)
        if (t.coef != 0.0) cols_[t.col].push_back({i, t.coef});
    // Repeated (row, column) entries are summed.
    for (auto& c : cols_) {
      std::sort(c.begin(), c.end());
      std::size_t k = 0;
      for (std::size_t t = 0; t < c.size(); ++t) {
        if (k > 0 && c[k - 1].first == c[t].first) c[k - 1].second += c[t].second;
        else c[k++] = c[t];
      }
      c.resize(k);
      std::erase_if(c, [](const auto& e) { return e.second == 0.0; });
    }

    row_scale_.assign(m_, 1.0);
    col_scale_.assign(n_, 1.0);
    for (int pass = 0; pass < 6; ++pass) {
      std::vector<double> rmax(m_, 0.0), rmin(m_, kInf);
      for (int j = 0; j < n_; ++j)
        for (auto [i, a] : cols_[j]) {
          const double v = std::abs(a) * row_scale_[i] * col_scale_[j];
          rmax[i] = std::max(rmax[i], v);
          rmin[i] = std::min(rmin[i], v);
        }
      for (int i = 0; i < m_; ++i)
        if (rmax[i] > 0.0) row_scale_[i] /= std::sqrt(rmax[i] * rmin[i]);
      for (int j = 0; j < n_; ++j) {
        double cmax = 0.0, cmin = kInf;
        for (auto [i, a] : cols_[j]) {
          const double v = std::abs(a) * row_scale_[i] * col_scale_[j];
          cmax = std::max(cmax, v);
          cmin = std::min(cmin, v);
        }
        if (cmax > 0.0) col_scale_[j] /= std::sqrt(cmax * cmin);
      }
    }
    // Final pass: make the largest entry of each row about one.
    {
      std::vector<double> rmax(m_, 0.0);
      for (int j = 0; j < n_; ++j)
        for (auto [i, a] : cols_[j])
          rmax[i] = std::max(rmax[i], std::abs(a) * row_scale_[i] * col_scale_[j]);
      for (int i = 0; i < m_; ++i)
        if (rmax[i] > 0.0) row_scale_[i] /= rmax[i];
    }
    for (auto& r : row_scale_) r = pow2_round(r);
    for (auto& c : col_scale_) c = pow2_round(c);

    for (int j = 0; j < n_; ++j)
      for (auto& [i, a] : cols_[j]) a *= row_scale_[i] * col_scale_[j];

    sense_ = prob_.maximize ? 1.0 : -1.0;
    double cmax = 0.0;
    for (int j = 0; j < n_; ++j)
      cmax = std::max(cmax, std::abs(prob_.objective[j] * col_scale_[j]));
    obj_scale_ = cmax > 0.0 ? pow2_round(1.0 / cmax) : 1.0;

    lb_.assign(total_, 0.0);
    ub_.assign(total_, 0.0);
    cost_.assign(total_, 0.0);
    for (int j = 0; j < n_; ++j) cost_[j] = sense_ * obj_scale_ * prob_.objective[j] * col_scale_[j];
    for (int i = 0; i < m_; ++i) {
      lb_[n_ + i] = prob_.rows[i].lower * row_scale_[i];
      ub_[n_ + i] = prob_.rows[i].upper * row_scale_[i];
    }
  }

  void init_basis() {
    x_.assign(total_, 0.0);
    at_upper_.assign(total_, false);
    pos_.assign(total_, -1);
    head_.assign(m_, 0);
    for (int j = 0; j < n_; ++j) {
      if (std::isfinite(lb_[j])) {
        x_[j] = lb_[j];
      } else if (std::isfinite(ub_[j])) {
        x_[j] = ub_[j];
        at_upper_[j] = true;
      } else {
        x_[j] = 0.0;
      }
    }
    for (int i = 0; i < m_; ++i) {
      head_[i] = n_ + i;
      pos_[n_ + i] = i;
    }
    binv_ = -Eigen::MatrixXd::Identity(m_, m_);
    compute_basics();
  }

  void warm_basis(const Basis& b) {
    x_.assign(total_, 0.0);
    at_upper_.assign(total_, false);
    pos_.assign(total_, -1);
    head_ = b.head;
    for (int r = 0; r < m_; ++r) pos_[head_[r]] = r;
    for (int j = 0; j < total_; ++j) {
      if (pos_[j] >= 0) continue;
      const bool up = b.at_upper[j] ? std::isfinite(ub_[j]) : !std::isfinite(lb_[j]) && std::isfinite(ub_[j]);
      if (up) {
        x_[j] = ub_[j];
        at_upper_[j] = true;
      } else if (std::isfinite(lb_[j])) {
        x_[j] = lb_[j];
      }
    }
    refactor();
    compute_basics();
  }

  double column_dot(int j, const std::vector<double>& v) const {
    if (j >= n_) return -v[j - n_];
    double s = 0.0;
    for (auto [i, a] : cols_[j]) s += a * v[i];
    return s;
  }

  void column_ftran(int j, std::vector<double>& out) const {
    Eigen::Map<Eigen::VectorXd> o(out.data(), m_);
    if (j >= n_) {
      o = -binv_.col(j - n_);
      return;
    }
    o.setZero();
    for (auto [i, a] : cols_[j]) o += a * binv_.col(i);
  }

  void compute_basics() {
    std::vector<double> rhs(m_, 0.0);
    for (int j = 0; j < total_; ++j) {
      if (pos_[j] >= 0 || x_[j] == 0.0) continue;
      if (j >= n_) {
        rhs[j - n_] -= -x_[j];
      } else {
        for (auto [i, a] : cols_[j]) rhs[i] -= a * x_[j];
      }
    }
    Eigen::Map<Eigen::VectorXd> b(rhs.data(), m_);
    Eigen::VectorXd xb = binv_ * b;
    for (int r = 0; r < m_; ++r) x_[head_[r]] = xb[r];
  }

  // With J the basic structural columns and R the rows whose logical is
  // nonbasic (|R| = |J|), B^-1 follows from the |J| x |J| block A[R, J]:
  //   w_J = A[R,J]^-1 b_R,   w_i = a_i^T w_J - b_i   for basic logicals i.
  void refactor() {
    if (m_ == 0) return;
    std::vector<int> jpos, rows_n, row_k(m_, -1);
    for (int r = 0; r < m_; ++r)
      if (head_[r] < n_) jpos.push_back(r);
    for (int i = 0; i < m_; ++i)
      if (pos_[n_ + i] < 0) {
        row_k[i] = static_cast<int>(rows_n.size());
        rows_n.push_back(i);
      }
    const int k = static_cast<int>(jpos.size());
    binv_.setZero(m_, m_);
    for (int i = 0; i < m_; ++i)
      if (pos_[n_ + i] >= 0) binv_(pos_[n_ + i], i) = -1.0;
    if (k == 0) return;
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(k, k);
    for (int b = 0; b < k; ++b)
      for (auto [i, a] : cols_[head_[jpos[b]]])
        if (row_k[i] >= 0) block(row_k[i], b) = a;
    const Eigen::MatrixXd kinv = block.partialPivLu().inverse();
    for (int a = 0; a < k; ++a) {
      const int c = rows_n[a];
      for (int b = 0; b < k; ++b) {
        const double w = kinv(b, a);
        if (w == 0.0) continue;
        binv_(jpos[b], c) = w;
        for (auto [i, coef] : cols_[head_[jpos[b]]])
          if (row_k[i] < 0) binv_(pos_[n_ + i], c) += coef * w;
      }
    }
  }

  void pivot(int p, const std::vector<double>& alpha) {
    const double ap = alpha[p];
    for (int k = 0; k < m_; ++k) {
      double* col = binv_.col(k).data();
      const double v = col[p] / ap;
      if (v != 0.0) {
        for (int r = 0; r < m_; ++r) col[r] -= alpha[r] * v;
      }
      col[p] = v;
    }
  }

  double primal_infeasibility() const {
    double total = 0.0;
    for (int r = 0; r < m_; ++r) {
      const int j = head_[r];
      if (x_[j] < lb_[j] - ftol(j, lb_[j])) total += lb_[j] - x_[j];
      else if (x_[j] > ub_[j] + ftol(j, ub_[j])) total += x_[j] - ub_[j];
    }
    return total;
  }

  void extract(Result& res, std::vector<double>& pi) {
    std::vector<double> cb(m_);
    for (int r = 0; r < m_; ++r) cb[r] = cost_[head_[r]];
    for (int k = 0; k < m_; ++k)
      pi[k] = m_ ? binv_.col(k).dot(Eigen::Map<const Eigen::VectorXd>(cb.data(), m_)) : 0.0;

    res.x.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j) res.x[j] = x_[j] * col_scale_[j];
    // Snap to bounds that the scaled value sits on.
    for (int j = 0; j < n_; ++j) {
      if (pos_[j] < 0) {
        if (at_upper_[j] && std::isfinite((*col_upper_)[j])) res.x[j] = (*col_upper_)[j];
        else if (!at_upper_[j] && std::isfinite((*col_lower_)[j])) res.x[j] = (*col_lower_)[j];
      }
    }
    res.row_activity.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      double s = 0.0;
      for (const Term& t : prob_.rows[i].terms) s += t.coef * res.x[t.col];
      res.row_activity[i] = s;
    }
    res.objective = 0.0;
    for (int j = 0; j < n_; ++j) res.objective += prob_.objective[j] * res.x[j];

    // Unscale duals: y_i = sense * pi_i * R_i / sigma.
    res.row_dual.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i)
      res.row_dual[i] = sense_ * pi[i] * row_scale_[i] / obj_scale_;
    res.reduced_cost.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j) {
      double d = prob_.objective[j];
      for (auto [i, a] : cols_[j]) {
        // a is scaled; recover the original coefficient.
        d -= res.row_dual[i] * a / (row_scale_[i] * col_scale_[j]);
      }
      res.reduced_cost[j] = d;
    }
  }

  const Problem& prob_;
  Options opt_;
  const std::vector<double>* col_lower_ = nullptr;
  const std::vector<double>* col_upper_ = nullptr;
  int m_ = 0, n_ = 0, total_ = 0;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> row_scale_, col_scale_;
  double obj_scale_ = 1.0;
  double relax_ = 1.0;  // feasibility tolerance multiplier
  double sense_ = 1.0;
  std::vector<double> lb_, ub_, cost_, x_;
  std::vector<bool> at_upper_;
  std::vector<int> pos_, head_;
  Eigen::MatrixXd binv_;
  int iterations_ = 0;
};

}  // namespace detail

// Repeated solves of one problem under different column bounds. Scaling is
// computed once; a basis from an earlier solve can seed the next one.
class Solver {
 public:
  explicit Solver(const Problem& problem, const Options& options = {})
      : simplex_(problem, options) {}

  Result solve(const std::vector<double>& col_lower, const std::vector<double>& col_upper,
               const Basis* start = nullptr) {
    return simplex_.run(col_lower, col_upper, start);
  }

 private:
  detail::Simplex simplex_;
};

inline Result solve(const Problem& problem, const Options& options = {}) {
  detail::Simplex simplex(problem, options);
  return simplex.run(problem.col_lower, problem.col_upper);
}

// Same problem with the column bounds replaced.
inline Result solve(const Problem& problem, const std::vector<double>& col_lower,
                    const std::vector<double>& col_upper, const Options& options = {},
                    const Basis* start = nullptr) {
  detail::Simplex simplex(problem, options);
  return simplex.run(col_lower, col_upper, start);
}

// Plain-text dump of an LP for external cross-checks.
//
//   LP <rows> <cols> <max|min>
//   C <j> <objective> <lower> <upper>        one line per column
//   R <i> <lower> <upper> <nnz> {<j> <coef>}  one line per row
//
// Numbers are printed with 17 significant digits; infinities as inf/-inf.
inline void write_text(std::ostream& os, const Problem& p) {
  os << std::setprecision(17);
  os << "LP " << p.num_rows() << ' ' << p.num_cols() << ' '
     << (p.maximize ? "max" : "min") << '\n';
  for (int j = 0; j < p.num_cols(); ++j)
    os << "C " << j << ' ' << p.objective[j] << ' ' << p.col_lower[j] << ' '
       << p.col_upper[j] << '\n';
  for (int i = 0; i < p.num_rows(); ++i) {
    const Row& r = p.rows[i];
    os << "R " << i << ' ' << r.lower << ' ' << r.upper << ' ' << r.terms.size();
    for (const Term& t : r.terms) os << ' ' << t.col << ' ' << t.coef;
    os << '\n';
  }
}

}  // namespace mecbend::lp
