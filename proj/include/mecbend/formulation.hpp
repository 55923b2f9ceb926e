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

// Decision variables, derived loads and delays, profit, constraint checks and
// the linear system G(X, Z, Y, U) >= 0 over the continuous variables.
//
// Layouts (E base stations, S services, server n = E is the cloud):
//   X, U   dense (E+1) x S, index n*S + s
//   Z, Y   dense S x E x (E+1), index (s*E + e)*(E+1) + n
//   v      continuous vector [Y ; U] used by G rows

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "mecbend/lp.hpp"
#include "mecbend/model.hpp"

namespace mecbend {

struct Dims {
  int E = 0;
  int S = 0;

  Dims() = default;
  Dims(int num_bs, int num_services) : E(num_bs), S(num_services) {}
  explicit Dims(const Instance& inst) : E(inst.num_bs()), S(inst.num_services()) {}

  int servers() const { return E + 1; }
  int cloud() const { return E; }
  int num_x() const { return (E + 1) * S; }
  int num_flows() const { return S * E * (E + 1); }
  int num_links() const { return E * (E + 1); }
  int x(int n, int s) const { return n * S + s; }
  int flow(int s, int e, int n) const { return (s * E + e) * (E + 1) + n; }
  int link(int e, int n) const { return e * (E + 1) + n; }
};

struct Solution {
  std::vector<std::uint8_t> x;
  std::vector<std::uint8_t> z;
  std::vector<double> y;
  std::vector<double> u;
};

inline Solution empty_solution(const Dims& d) {
  Solution sol;
  sol.x.assign(d.num_x(), 0);
  sol.z.assign(d.num_flows(), 0);
  sol.y.assign(d.num_flows(), 0.0);
  sol.u.assign(d.num_x(), 0.0);
  return sol;
}

// Every service stored at the cloud only, no flows open, nothing served.
inline Solution cloud_only(const Instance& inst) {
  const Dims d(inst);
  Solution sol = empty_solution(d);
  for (int s = 0; s < d.S; ++s) sol.x[d.x(d.cloud(), s)] = 1;
  return sol;
}

inline void check_dims(const Dims& d, const Solution& sol) {
  if (static_cast<int>(sol.x.size()) != d.num_x() ||
      static_cast<int>(sol.u.size()) != d.num_x() ||
      static_cast<int>(sol.z.size()) != d.num_flows() ||
      static_cast<int>(sol.y.size()) != d.num_flows()) {
    throw IndexError("solution arrays do not match instance dimensions");
  }
}

// Coefficient multiplying (B^l - Lambda^l) in the network-delay row, i.e.
// max(alpha*D - d, 0) / beta, so that the row is equivalent to
// D^cng + d^prp <= alpha*D.
inline double network_delay_coef(const Instance& inst, int s, int e, int n) {
  const Service& svc = inst.services[s];
  const double budget = inst.params.alpha * svc.max_delay - inst.topology.link(e, n).propagation;
  return std::max(budget, 0.0) / svc.output;
}

// Share of D^max left for the service delay on a flow e -> n.
inline double service_budget_factor(const Instance& inst, int e, int n) {
  return n == e ? 1.0 : 1.0 - inst.params.alpha;
}

// Presolve: false when z_sen is forced to zero by the link relation or by a
// zero coefficient in one of the delay rows.
inline bool flow_allowed(const Instance& inst, int s, int e, int n) {
  if (!inst.topology.has_link(e, n)) return false;
  if (n == e) return true;
  if (!(inst.params.alpha < 1.0)) return false;
  const double d = inst.topology.link(e, n).propagation;
  return inst.params.alpha * inst.services[s].max_delay > d;
}

// ---------------------------------------------------------------------------
// Loads, delays, profit

struct Loads {
  std::vector<double> server;  // Lambda_ns, index n*S + s
  std::vector<double> link;    // Lambda^l_en, index e*(E+1) + n
};

inline Loads compute_loads(const Instance& inst, const std::vector<double>& y) {
  const Dims d(inst);
  if (static_cast<int>(y.size()) != d.num_flows()) throw IndexError("Y has wrong size");
  Loads l;
  l.server.assign(d.num_x(), 0.0);
  l.link.assign(d.num_links(), 0.0);
  for (int s = 0; s < d.S; ++s)
    for (int e = 0; e < d.E; ++e) {
      const double lam = inst.demand(e, s);
      for (int n = 0; n < d.servers(); ++n) {
        const double yv = y[d.flow(s, e, n)];
        if (yv == 0.0) continue;
        l.server[d.x(n, s)] += lam * yv;
        l.link[d.link(e, n)] += inst.services[s].output * lam * yv;
      }
    }
  return l;
}

// Mean sojourn of an M/M/1 queue with service rate u/nu and arrival rate
// lambda; +inf when the queue is not stable.
inline double service_delay(double u, double nu, double lambda) {
  const double slack = u / nu - lambda;
  return slack > 0.0 ? 1.0 / slack : kInf;
}

inline double congestion_delay(double beta, double bandwidth, double link_load,
                               bool self_link = false) {
  if (self_link) return 0.0;
  const double slack = bandwidth - link_load;
  return slack > 0.0 ? beta / slack : kInf;
}

struct ProfitBreakdown {
  double revenue = 0.0;
  double storage = 0.0;
  double cpu = 0.0;
  double transfer = 0.0;
  double total = 0.0;
};

inline double storage_cost(const Instance& inst, const std::vector<std::uint8_t>& x) {
  const Dims d(inst);
  double c = 0.0;
  for (int n = 0; n < d.servers(); ++n)
    for (int s = 0; s < d.S; ++s)
      if (x[d.x(n, s)]) c += inst.services[s].size * inst.prices.storage[n];
  return c;
}

inline ProfitBreakdown profit(const Instance& inst, const Solution& sol) {
  const Dims d(inst);
  check_dims(d, sol);
  const Loads l = compute_loads(inst, sol.y);
  ProfitBreakdown p;
  for (int n = 0; n < d.servers(); ++n)
    for (int s = 0; s < d.S; ++s) {
      p.revenue += inst.prices.revenue(n, s) * l.server[d.x(n, s)];
      p.cpu += inst.prices.cpu[n] * sol.u[d.x(n, s)];
    }
  for (int e = 0; e < d.E; ++e)
    for (int n = 0; n < d.servers(); ++n)
      p.transfer += l.link[d.link(e, n)] * inst.prices.transfer(e, n);
  p.storage = storage_cost(inst, sol.x);
  p.total = p.revenue - p.cpu - p.transfer - p.storage;
  return p;
}

struct FlowDelay {
  int s = 0, e = 0, n = 0;
  double service = 0.0;
  double propagation = 0.0;
  double congestion = 0.0;
  double total() const { return service + propagation + congestion; }
};

// Delay breakdown of every flow with y_sen > threshold.
inline std::vector<FlowDelay> flow_delays(const Instance& inst, const Solution& sol,
                                          double threshold = 0.0) {
  const Dims d(inst);
  check_dims(d, sol);
  const Loads l = compute_loads(inst, sol.y);
  std::vector<FlowDelay> out;
  for (int s = 0; s < d.S; ++s)
    for (int e = 0; e < d.E; ++e)
      for (int n = 0; n < d.servers(); ++n) {
        if (!(sol.y[d.flow(s, e, n)] > threshold)) continue;
        FlowDelay f{s, e, n};
        f.service = service_delay(sol.u[d.x(n, s)], inst.services[s].work,
                                  l.server[d.x(n, s)]);
        const Link& lk = inst.topology.link(e, n);
        f.propagation = lk.propagation;
        f.congestion = congestion_delay(inst.services[s].output, lk.bandwidth,
                                        l.link[d.link(e, n)], n == e);
        out.push_back(f);
      }
  return out;
}

// Fraction of total demand served at base stations.
inline double hit_ratio(const Instance& inst, const Solution& sol) {
  const Dims d(inst);
  double total = 0.0, edge = 0.0;
  for (int s = 0; s < d.S; ++s)
    for (int e = 0; e < d.E; ++e) {
      const double lam = inst.demand(e, s);
      total += lam;
      for (int n = 0; n < d.E; ++n) edge += lam * sol.y[d.flow(s, e, n)];
    }
  return total > 0.0 ? edge / total : 0.0;
}

// Demand-weighted mean end-to-end delay of the served requests (seconds).
inline double mean_delay(const Instance& inst, const Solution& sol) {
  const Dims d(inst);
  double num = 0.0, den = 0.0;
  for (const FlowDelay& f : flow_delays(inst, sol)) {
    const double w = inst.demand(f.e, f.s) * sol.y[d.flow(f.s, f.e, f.n)];
    num += w * f.total();
    den += w;
  }
  return den > 0.0 ? num / den : 0.0;
}

// ---------------------------------------------------------------------------
// The linear system G

enum class Family {
  kAdmission,        // 1 - sum_n y_sen                       per (s, e)
  kAccessBandwidth,  // B_e - sum beta lambda y               per e
  kCompute,          // M_e - sum_s u_es                      per e
  kServerStability,  // u_ns/nu_s - Lambda_ns                 per (s, n)
  kLinkStability,    // B^l_en - Lambda^l_en                  per linked (e, n), n != e
  kLocalDelay,       // D (u/nu - Lambda) - z                 per (s, e), n = e
  kRemoteDelay,      // (1-alpha) D (u/nu - Lambda) - z       per linked (s, e, n), n != e
  kNetworkDelay,     // k_sen (B^l - Lambda^l) - z            per linked (s, e, n), n != e
  kTransfer,         // z - y                                 per (s, e, n)
};

inline const char* family_name(Family f) {
  switch (f) {
    case Family::kAdmission: return "admission";
    case Family::kAccessBandwidth: return "access_bandwidth";
    case Family::kCompute: return "compute";
    case Family::kServerStability: return "server_stability";
    case Family::kLinkStability: return "link_stability";
    case Family::kLocalDelay: return "local_delay";
    case Family::kRemoteDelay: return "remote_delay";
    case Family::kNetworkDelay: return "network_delay";
    case Family::kTransfer: return "transfer";
  }
  return "unknown";
}

inline bool is_delay_family(Family f) {
  return f == Family::kLocalDelay || f == Family::kRemoteDelay ||
         f == Family::kNetworkDelay || f == Family::kTransfer;
}

// G_i(X, Z, v) = constant + z_coef * z[z_flow] + sum terms . v
struct GRow {
  Family family;
  int s = -1, e = -1, n = -1;
  std::vector<lp::Term> terms;
  double constant = 0.0;
  int z_flow = -1;
  double z_coef = 0.0;
};

class GSystem {
 public:
  Dims dims;
  std::vector<GRow> rows;

  int num_vars() const { return dims.num_flows() + dims.num_x(); }
  int y_var(int s, int e, int n) const { return dims.flow(s, e, n); }
  int u_var(int n, int s) const { return dims.num_flows() + dims.x(n, s); }

  double z_part(const GRow& r, const std::vector<std::uint8_t>& z) const {
    return r.z_flow >= 0 ? r.z_coef * z[r.z_flow] : 0.0;
  }

  // (Y, U)-dependent part: constant + terms . v
  double yu_part(const GRow& r, const std::vector<double>& v) const {
    double acc = r.constant;
    for (const lp::Term& t : r.terms) acc += t.coef * v[t.col];
    return acc;
  }

  double evaluate(int i, const std::vector<std::uint8_t>& z, const std::vector<double>& v) const {
    return yu_part(rows[i], v) + z_part(rows[i], z);
  }

  // Magnitude used to scale slack tolerances.
  double magnitude(int i, const std::vector<std::uint8_t>& z, const std::vector<double>& v) const {
    const GRow& r = rows[i];
    double m = std::abs(r.constant) + std::abs(z_part(r, z));
    for (const lp::Term& t : r.terms) m = std::max(m, std::abs(t.coef * v[t.col]));
    return m;
  }

  std::string row_label(int i) const {
    const GRow& r = rows[i];
    std::ostringstream os;
    os << family_name(r.family) << '(';
    bool first = true;
    for (int idx : {r.s, r.e, r.n}) {
      if (idx < 0) continue;
      if (!first) os << ',';
      os << idx + 1;
      first = false;
    }
    os << ')';
    return os.str();
  }
};

inline std::vector<double> pack_yu(const std::vector<double>& y, const std::vector<double>& u) {
  std::vector<double> v(y);
  v.insert(v.end(), u.begin(), u.end());
  return v;
}

// Rows of G in canonical order. The row set depends only on the instance;
// Z enters through z_flow/z_coef and X does not appear at all.
inline GSystem build_G(const Instance& inst) {
  GSystem g;
  g.dims = Dims(inst);
  const Dims& d = g.dims;
  const auto& topo = inst.topology;
  const double alpha = inst.params.alpha;

  auto load_terms = [&](int s, int n, double scale, std::vector<lp::Term>& out) {
    for (int e = 0; e < d.E; ++e) {
      const double lam = inst.demand(e, s);
      if (lam != 0.0) out.push_back({g.y_var(s, e, n), -scale * lam});
    }
  };
  auto link_terms = [&](int e, int n, double scale, std::vector<lp::Term>& out) {
    for (int s = 0; s < d.S; ++s) {
      const double a = inst.services[s].output * inst.demand(e, s);
      if (a != 0.0) out.push_back({g.y_var(s, e, n), -scale * a});
    }
  };

  for (int s = 0; s < d.S; ++s)
    for (int e = 0; e < d.E; ++e) {
      GRow r{Family::kAdmission, s, e, -1, {}};
      r.constant = 1.0;
      for (int n = 0; n < d.servers(); ++n) r.terms.push_back({g.y_var(s, e, n), -1.0});
      g.rows.push_back(std::move(r));
    }
  for (int e = 0; e < d.E; ++e) {
    GRow r{Family::kAccessBandwidth, -1, e, -1, {}};
    r.constant = topo.access_bandwidth[e];
    for (int s = 0; s < d.S; ++s) {
      const double a = inst.services[s].output * inst.demand(e, s);
      if (a == 0.0) continue;
      for (int n = 0; n < d.servers(); ++n) r.terms.push_back({g.y_var(s, e, n), -a});
    }
    g.rows.push_back(std::move(r));
  }
  for (int e = 0; e < d.E; ++e) {
    GRow r{Family::kCompute, -1, e, -1, {}};
    r.constant = topo.compute[e];
    for (int s = 0; s < d.S; ++s) r.terms.push_back({g.u_var(e, s), -1.0});
    g.rows.push_back(std::move(r));
  }
  for (int s = 0; s < d.S; ++s)
    for (int n = 0; n < d.servers(); ++n) {
      GRow r{Family::kServerStability, s, -1, n, {}};
      r.terms.push_back({g.u_var(n, s), 1.0 / inst.services[s].work});
      load_terms(s, n, 1.0, r.terms);
      g.rows.push_back(std::move(r));
    }
  for (int e = 0; e < d.E; ++e)
    for (int n = 0; n < d.servers(); ++n) {
      if (n == e || !topo.has_link(e, n)) continue;
      GRow r{Family::kLinkStability, -1, e, n, {}};
      r.constant = topo.link(e, n).bandwidth;
      link_terms(e, n, 1.0, r.terms);
      g.rows.push_back(std::move(r));
    }
  auto delay_row = [&](Family fam, int s, int e, int n, double factor) {
    GRow r{fam, s, e, n, {}};
    const double D = factor * inst.services[s].max_delay;
    if (D != 0.0) {
      r.terms.push_back({g.u_var(n, s), D / inst.services[s].work});
      load_terms(s, n, D, r.terms);
    }
    r.z_flow = d.flow(s, e, n);
    r.z_coef = -1.0;
    return r;
  };
  for (int s = 0; s < d.S; ++s)
    for (int e = 0; e < d.E; ++e) g.rows.push_back(delay_row(Family::kLocalDelay, s, e, e, 1.0));
  for (int s = 0; s < d.S; ++s)
    for (int e = 0; e < d.E; ++e)
      for (int n = 0; n < d.servers(); ++n) {
        if (n == e || !topo.has_link(e, n)) continue;
        g.rows.push_back(delay_row(Family::kRemoteDelay, s, e, n, 1.0 - alpha));
      }
  for (int s = 0; s < d.S; ++s)
    for (int e = 0; e < d.E; ++e)
      for (int n = 0; n < d.servers(); ++n) {
        if (n == e || !topo.has_link(e, n)) continue;
        GRow r{Family::kNetworkDelay, s, e, n, {}};
        const double k = network_delay_coef(inst, s, e, n);
        if (k != 0.0) {
          r.constant = k * topo.link(e, n).bandwidth;
          link_terms(e, n, k, r.terms);
        }
        r.z_flow = d.flow(s, e, n);
        r.z_coef = -1.0;
        g.rows.push_back(std::move(r));
      }
  for (int s = 0; s < d.S; ++s)
    for (int e = 0; e < d.E; ++e)
      for (int n = 0; n < d.servers(); ++n) {
        GRow r{Family::kTransfer, s, e, n, {}};
        r.terms.push_back({g.y_var(s, e, n), -1.0});
        r.z_flow = d.flow(s, e, n);
        r.z_coef = 1.0;
        g.rows.push_back(std::move(r));
      }
  return g;
}

// Rows with X and Z substituted: the Z term is folded into the constant.
struct FixedRow {
  Family family;
  int s, e, n;
  std::vector<lp::Term> terms;
  double constant;
};

inline std::vector<FixedRow> build_G(const Instance& inst, const std::vector<std::uint8_t>& x,
                                     const std::vector<std::uint8_t>& z) {
  const GSystem g = build_G(inst);
  if (static_cast<int>(x.size()) != g.dims.num_x() ||
      static_cast<int>(z.size()) != g.dims.num_flows())
    throw IndexError("X/Z do not match instance dimensions");
  std::vector<FixedRow> out;
  out.reserve(g.rows.size());
  for (const GRow& r : g.rows)
    out.push_back(FixedRow{r.family, r.s, r.e, r.n, r.terms, r.constant + g.z_part(r, z)});
  return out;
}

// ---------------------------------------------------------------------------
// Constraint checks

struct Violation {
  std::string constraint;
  double slack;  // negative amount by which the constraint is violated

  std::string message() const {
    std::ostringstream os;
    os << constraint << " violated (slack " << slack << ")";
    return os.str();
  }
};

namespace detail {

inline std::string idx(std::initializer_list<int> v) {
  std::ostringstream os;
  bool first = true;
  for (int i : v) {
    if (!first) os << ',';
    os << i + 1;
    first = false;
  }
  return os.str();
}

// slack >= -tol * max(1, scale)
inline void require(std::vector<Violation>& out, double slack, double scale, double tol,
                    const std::string& what) {
  if (!(slack >= -tol * std::max(1.0, std::abs(scale)))) out.push_back({what, slack});
}

inline void check_common(const Instance& inst, const Solution& sol, double tol,
                         std::vector<Violation>& out) {
  const Dims d(inst);
  for (int s = 0; s < d.S; ++s)
    if (!sol.x[d.x(d.cloud(), s)]) out.push_back({"cloud_copy(" + idx({s}) + ")", -1.0});
  for (int e = 0; e < d.E; ++e) {
    double used = 0.0;
    for (int s = 0; s < d.S; ++s)
      if (sol.x[d.x(e, s)]) used += inst.services[s].size;
    require(out, inst.topology.storage[e] - used, inst.topology.storage[e], tol,
            "storage(" + idx({e}) + ")");
  }
  for (int i = 0; i < d.num_flows(); ++i) {
    require(out, sol.y[i], 0.0, tol, "y_nonnegative[" + std::to_string(i) + "]");
    require(out, 1.0 - sol.y[i], 1.0, tol, "y_at_most_one[" + std::to_string(i) + "]");
  }
  for (int i = 0; i < d.num_x(); ++i)
    require(out, sol.u[i], 0.0, tol, "u_nonnegative[" + std::to_string(i) + "]");
}

}  // namespace detail

// Constraints of the original problem, with the indicator delay constraint
// evaluated on every flow with y_sen > tol.
inline std::vector<Violation> check_original(const Instance& inst, const Solution& sol,
                                             double tol = 1e-6) {
  const Dims d(inst);
  check_dims(d, sol);
  std::vector<Violation> out;
  detail::check_common(inst, sol, tol, out);
  const Loads l = compute_loads(inst, sol.y);
  const auto& topo = inst.topology;
  using detail::idx;
  using detail::require;

  for (int s = 0; s < d.S; ++s)
    for (int e = 0; e < d.E; ++e) {
      double sum = 0.0;
      for (int n = 0; n < d.servers(); ++n) sum += sol.y[d.flow(s, e, n)];
      require(out, 1.0 - sum, 1.0, tol, "admission(" + idx({s, e}) + ")");
    }
  for (int e = 0; e < d.E; ++e) {
    double traffic = 0.0;
    for (int s = 0; s < d.S; ++s)
      for (int n = 0; n < d.servers(); ++n)
        traffic += inst.services[s].output * inst.demand(e, s) * sol.y[d.flow(s, e, n)];
    require(out, topo.access_bandwidth[e] - traffic, topo.access_bandwidth[e], tol,
            "access_bandwidth(" + idx({e}) + ")");
  }
  for (int s = 0; s < d.S; ++s)
    for (int e = 0; e < d.E; ++e)
      for (int n = 0; n < d.servers(); ++n) {
        const double cap = (sol.x[d.x(n, s)] && topo.has_link(e, n)) ? 1.0 : 0.0;
        require(out, cap - sol.y[d.flow(s, e, n)], 1.0, tol, "routing(" + idx({s, e, n}) + ")");
      }
  for (int e = 0; e < d.E; ++e) {
    double used = 0.0;
    for (int s = 0; s < d.S; ++s) used += sol.u[d.x(e, s)];
    require(out, topo.compute[e] - used, topo.compute[e], tol, "compute(" + idx({e}) + ")");
  }
  for (int s = 0; s < d.S; ++s)
    for (int n = 0; n < d.servers(); ++n) {
      const double rate = sol.u[d.x(n, s)] / inst.services[s].work;
      const double lam = l.server[d.x(n, s)];
      require(out, rate - lam, std::max(rate, lam), tol, "server_stability(" + idx({s, n}) + ")");
    }
  for (int e = 0; e < d.E; ++e)
    for (int n = 0; n < d.servers(); ++n) {
      if (n == e || !topo.has_link(e, n)) continue;
      const double b = topo.link(e, n).bandwidth;
      require(out, b - l.link[d.link(e, n)], b, tol, "link_stability(" + idx({e, n}) + ")");
    }
  for (const FlowDelay& f : flow_delays(inst, sol, tol)) {
    const double dmax = inst.services[f.s].max_delay;
    const double total = f.total();
    const double slack = std::isfinite(total) ? dmax - total : -kInf;
    if (!(slack >= -tol)) out.push_back({"delay(" + idx({f.s, f.e, f.n}) + ")", slack});
  }
  return out;
}

// Constraints of the reformulated problem: storage, z <= x l, presolve
// fixings, domains and every row of G.
inline std::vector<Violation> check_reformulated(const Instance& inst, const Solution& sol,
                                                 double tol = 1e-6) {
  const Dims d(inst);
  check_dims(d, sol);
  std::vector<Violation> out;
  detail::check_common(inst, sol, tol, out);
  using detail::idx;
  for (int s = 0; s < d.S; ++s)
    for (int e = 0; e < d.E; ++e)
      for (int n = 0; n < d.servers(); ++n) {
        const int f = d.flow(s, e, n);
        if (!sol.z[f]) continue;
        if (!sol.x[d.x(n, s)] || !inst.topology.has_link(e, n))
          out.push_back({"transfer_link(" + idx({s, e, n}) + ")", -1.0});
        else if (!flow_allowed(inst, s, e, n))
          out.push_back({"presolve_fixing(" + idx({s, e, n}) + ")", -1.0});
      }
  const GSystem g = build_G(inst);
  const std::vector<double> v = pack_yu(sol.y, sol.u);
  for (int i = 0; i < static_cast<int>(g.rows.size()); ++i) {
    const double val = g.evaluate(i, sol.z, v);
    detail::require(out, val, g.magnitude(i, sol.z, v), tol, g.row_label(i));
  }
  return out;
}

}  // namespace mecbend
