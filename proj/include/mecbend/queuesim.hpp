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

// Discrete-event check of the M/M/1 delay model.
//
// Requests of (e, s) arrive as Poisson(lambda_es) and are routed to server n
// with probability y_sen (dropped otherwise). A remote request first queues
// FIFO on link (e, n) with exponential transmission time of mean
// beta_s / B^l_en, then travels d^prp_en, then queues at the dedicated
// (n, s) server with exponential service of rate u_ns / nu_s. The network is
// feed-forward, so each queue is run with the Lindley recursion once its
// arrival times are known.
//
// Statistics use samples that arrive after the first 10% of the horizon and
// standard errors from 20 batch means.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "mecbend/formulation.hpp"
#include "mecbend/model.hpp"
#include "mecbend/random.hpp"

namespace mecbend {

struct SimOptions {
  long arrivals = 200'000;
  std::uint64_t seed = 1;
  double warmup = 0.1;
  int batches = 20;
  double min_flow = 1e-12;  // y below this counts as not routed
};

struct SampleStats {
  double mean = 0.0;
  double stderr_ = 0.0;
  long samples = 0;
};

// Batch-means estimate over samples in arrival order.
inline SampleStats batch_means(const std::vector<double>& v, int batches) {
  SampleStats st;
  st.samples = static_cast<long>(v.size());
  if (v.empty()) return st;
  double sum = 0.0;
  for (double x : v) sum += x;
  st.mean = sum / static_cast<double>(v.size());
  const long per = st.samples / batches;
  if (per < 1) {
    st.stderr_ = kInf;
    return st;
  }
  std::vector<double> bm(batches, 0.0);
  for (int b = 0; b < batches; ++b) {
    double s = 0.0;
    for (long i = b * per; i < (b + 1) * per; ++i) s += v[i];
    bm[b] = s / static_cast<double>(per);
  }
  double m = 0.0;
  for (double x : bm) m += x;
  m /= batches;
  double var = 0.0;
  for (double x : bm) var += (x - m) * (x - m);
  var /= (batches - 1);
  st.stderr_ = std::sqrt(var / batches);
  return st;
}

struct QueueStat {
  enum class Kind { kServer, kLink } kind = Kind::kServer;
  int s = -1, e = -1, n = -1;
  double analytic = 0.0;  // seconds
  SampleStats sim;
  double rho = 0.0;
  bool mixed_sizes = false;  // link carries services with different beta

  std::string id() const {
    if (kind == Kind::kServer) return "server:" + std::to_string(n + 1) + ":" + std::to_string(s + 1);
    return "link:" + std::to_string(e + 1) + ":" + std::to_string(n + 1);
  }
};

struct FlowStat {
  int s = -1, e = -1, n = -1;
  double analytic = 0.0;  // D^srv + d^prp + D^cng
  double max_delay = 0.0;
  SampleStats sim;
};

struct SimReport {
  std::vector<QueueStat> queues;
  std::vector<FlowStat> flows;
  std::vector<FlowStat> routing;  // per flow: analytic = lambda*y, sim = observed rate
};

namespace detail {

// Sojourn times of a FIFO single server; arrivals must be sorted.
inline std::vector<double> lindley(const std::vector<double>& arrival,
                                   const std::vector<double>& service) {
  std::vector<double> out(arrival.size());
  double free_at = -kInf;
  for (std::size_t i = 0; i < arrival.size(); ++i) {
    const double start = std::max(arrival[i], free_at);
    free_at = start + service[i];
    out[i] = free_at - arrival[i];
  }
  return out;
}

}  // namespace detail

// Mean sojourn of an M/M/1 queue, simulated.
inline SampleStats simulate_mm1(double lambda, double mu, long arrivals, std::uint64_t seed,
                                double warmup = 0.1, int batches = 20) {
  if (!(lambda < mu)) throw ContractError("M/M/1 requires lambda < mu");
  Stream st(seed, 11, 0);
  std::vector<double> a(arrivals), sv(arrivals);
  double t = 0.0;
  for (long i = 0; i < arrivals; ++i) {
    t += st.exponential(lambda);
    a[i] = t;
    sv[i] = st.exponential(mu);
  }
  const std::vector<double> soj = detail::lindley(a, sv);
  const long skip = static_cast<long>(warmup * static_cast<double>(arrivals));
  return batch_means(std::vector<double>(soj.begin() + skip, soj.end()), batches);
}

inline SimReport simulate(const Instance& inst, const Solution& sol, const SimOptions& opt = {}) {
  const Dims d(inst);
  check_dims(d, sol);
  const Loads loads = compute_loads(inst, sol.y);

  // Stability of every queue that receives traffic.
  for (int n = 0; n < d.servers(); ++n)
    for (int s = 0; s < d.S; ++s) {
      const double lam = loads.server[d.x(n, s)];
      if (lam <= 0.0) continue;
      const double mu = sol.u[d.x(n, s)] / inst.services[s].work;
      if (!(lam < mu))
        throw ContractError("server " + std::to_string(n + 1) + " service " +
                            std::to_string(s + 1) + " is unstable (rho >= 1)");
    }
  for (int e = 0; e < d.E; ++e)
    for (int n = 0; n < d.servers(); ++n) {
      if (n == e) continue;
      const double load = loads.link[d.link(e, n)];
      if (load <= 0.0) continue;
      if (!(load < inst.topology.link(e, n).bandwidth))
        throw ContractError("link " + std::to_string(e + 1) + "->" + std::to_string(n + 1) +
                            " is unstable (rho >= 1)");
    }

  // Arrival process: one merged Poisson stream, class picked by rate.
  struct Source {
    int e, s;
    double rate;
  };
  std::vector<Source> src;
  double total = 0.0;
  for (int e = 0; e < d.E; ++e)
    for (int s = 0; s < d.S; ++s)
      if (inst.demand(e, s) > 0.0) {
        src.push_back({e, s, inst.demand(e, s)});
        total += inst.demand(e, s);
      }
  SimReport rep;
  if (src.empty() || opt.arrivals <= 0) return rep;
  std::vector<double> cum(src.size());
  {
    double c = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i) cum[i] = (c += src[i].rate / total);
  }

  struct Req {
    double t;       // arrival at the BS
    int flow;
    double link_out = 0.0;  // arrival at the server
    double sojourn = 0.0;
  };
  std::vector<Req> reqs;
  reqs.reserve(opt.arrivals);
  Stream arr(opt.seed, 21, 0), route(opt.seed, 22, 0);
  double t = 0.0;
  for (long i = 0; i < opt.arrivals; ++i) {
    t += arr.exponential(total);
    const double u = arr.uniform();
    const std::size_t k = std::min<std::size_t>(
        std::lower_bound(cum.begin(), cum.end(), u) - cum.begin(), src.size() - 1);
    const int e = src[k].e, s = src[k].s;
    double r = route.uniform();
    for (int n = 0; n < d.servers(); ++n) {
      const double y = sol.y[d.flow(s, e, n)];
      if (y < opt.min_flow) continue;
      if (r < y) {
        reqs.push_back(Req{t, d.flow(s, e, n)});
        break;
      }
      r -= y;
    }
  }
  const double horizon = t;
  const double t_warm = opt.warmup * horizon;
  auto decode = [&](int f, int& s, int& e, int& n) {
    n = f % d.servers();
    e = (f / d.servers()) % d.E;
    s = f / (d.E * d.servers());
  };

  // Link queues, FIFO over all services in arrival order.
  std::vector<std::vector<int>> on_link(d.num_links());
  for (int i = 0; i < static_cast<int>(reqs.size()); ++i) {
    int s, e, n;
    decode(reqs[i].flow, s, e, n);
    if (n == e) reqs[i].link_out = reqs[i].t;
    else on_link[d.link(e, n)].push_back(i);
  }
  std::vector<double> link_soj(reqs.size(), 0.0);
  for (int e = 0; e < d.E; ++e)
    for (int n = 0; n < d.servers(); ++n) {
      const auto& idx = on_link[d.link(e, n)];
      if (idx.empty()) continue;
      Stream svc(opt.seed, 23, d.link(e, n));
      const Link& lk = inst.topology.link(e, n);
      std::vector<double> a(idx.size()), sv(idx.size());
      double beta_min = kInf, beta_max = 0.0, beta_sum = 0.0;
      for (std::size_t k = 0; k < idx.size(); ++k) {
        int s, ee, nn;
        decode(reqs[idx[k]].flow, s, ee, nn);
        const double beta = inst.services[s].output;
        a[k] = reqs[idx[k]].t;
        sv[k] = svc.exponential(lk.bandwidth / beta);
      }
      const std::vector<double> soj = detail::lindley(a, sv);
      std::vector<double> kept;
      double served_rate = 0.0;
      for (int s = 0; s < d.S; ++s) {
        const double lam = inst.demand(e, s) * sol.y[d.flow(s, e, n)];
        if (lam <= 0.0) continue;
        served_rate += lam;
        const double beta = inst.services[s].output;
        beta_min = std::min(beta_min, beta);
        beta_max = std::max(beta_max, beta);
        beta_sum += lam * beta;
      }
      for (std::size_t k = 0; k < idx.size(); ++k) {
        link_soj[idx[k]] = soj[k];
        reqs[idx[k]].link_out = reqs[idx[k]].t + soj[k] + lk.propagation;
        if (reqs[idx[k]].t >= t_warm) kept.push_back(soj[k]);
      }
      QueueStat q;
      q.kind = QueueStat::Kind::kLink;
      q.e = e;
      q.n = n;
      const double load = loads.link[d.link(e, n)];
      const double beta_mean = served_rate > 0.0 ? beta_sum / served_rate : 0.0;
      q.analytic = beta_mean / (lk.bandwidth - load);
      q.rho = load / lk.bandwidth;
      q.mixed_sizes = beta_max > beta_min * (1.0 + 1e-9);
      q.sim = batch_means(kept, opt.batches);
      rep.queues.push_back(q);
    }

  // Server queues, in order of arrival at the server.
  std::vector<std::vector<int>> at_server(d.num_x());
  for (int i = 0; i < static_cast<int>(reqs.size()); ++i) {
    int s, e, n;
    decode(reqs[i].flow, s, e, n);
    at_server[d.x(n, s)].push_back(i);
  }
  std::vector<double> srv_soj(reqs.size(), 0.0);
  for (int n = 0; n < d.servers(); ++n)
    for (int s = 0; s < d.S; ++s) {
      auto& idx = at_server[d.x(n, s)];
      if (idx.empty()) continue;
      std::stable_sort(idx.begin(), idx.end(),
                       [&](int a, int b) { return reqs[a].link_out < reqs[b].link_out; });
      Stream svc(opt.seed, 24, d.x(n, s));
      const double mu = sol.u[d.x(n, s)] / inst.services[s].work;
      std::vector<double> a(idx.size()), sv(idx.size());
      for (std::size_t k = 0; k < idx.size(); ++k) {
        a[k] = reqs[idx[k]].link_out;
        sv[k] = svc.exponential(mu);
      }
      const std::vector<double> soj = detail::lindley(a, sv);
      std::vector<double> kept;
      for (std::size_t k = 0; k < idx.size(); ++k) {
        srv_soj[idx[k]] = soj[k];
        if (a[k] >= t_warm) kept.push_back(soj[k]);
      }
      QueueStat q;
      q.kind = QueueStat::Kind::kServer;
      q.s = s;
      q.n = n;
      const double lam = loads.server[d.x(n, s)];
      q.analytic = service_delay(sol.u[d.x(n, s)], inst.services[s].work, lam);
      q.rho = lam / mu;
      q.sim = batch_means(kept, opt.batches);
      rep.queues.push_back(q);
    }

  // End-to-end per flow and observed routing rates.
  std::vector<std::vector<double>> e2e(d.num_flows());
  std::vector<long> counted(d.num_flows(), 0);
  for (std::size_t i = 0; i < reqs.size(); ++i) {
    const Req& r = reqs[i];
    if (r.t < t_warm) continue;
    int s, e, n;
    decode(r.flow, s, e, n);
    e2e[r.flow].push_back(link_soj[i] + inst.topology.link(e, n).propagation + srv_soj[i]);
    ++counted[r.flow];
  }
  const std::vector<FlowDelay> fd = flow_delays(inst, sol, opt.min_flow);
  for (const FlowDelay& f : fd) {
    const int fi = d.flow(f.s, f.e, f.n);
    if (inst.demand(f.e, f.s) <= 0.0) continue;
    FlowStat fs;
    fs.s = f.s;
    fs.e = f.e;
    fs.n = f.n;
    fs.analytic = f.total();
    fs.max_delay = inst.services[f.s].max_delay;
    fs.sim = batch_means(e2e[fi], opt.batches);
    rep.flows.push_back(fs);

    FlowStat rt = fs;
    rt.analytic = inst.demand(f.e, f.s) * sol.y[fi];
    rt.max_delay = 0.0;
    const double span = horizon - t_warm;
    rt.sim.samples = counted[fi];
    rt.sim.mean = span > 0.0 ? static_cast<double>(counted[fi]) / span : 0.0;
    rt.sim.stderr_ = span > 0.0 ? std::sqrt(static_cast<double>(counted[fi])) / span : kInf;
    rep.routing.push_back(rt);
  }
  return rep;
}

// queue id, analytic_ms, simulated_ms, stderr_ms, samples (then flows).
inline void write_sim_csv(std::ostream& os, const SimReport& rep, const std::string& manifest = {}) {
  if (!manifest.empty()) os << "# manifest " << manifest << '\n';
  os << "queue,analytic_ms,simulated_ms,stderr_ms,samples,rho,mixed_sizes\n";
  os << std::setprecision(10);
  for (const QueueStat& q : rep.queues)
    os << q.id() << ',' << q.analytic * 1e3 << ',' << q.sim.mean * 1e3 << ','
       << q.sim.stderr_ * 1e3 << ',' << q.sim.samples << ',' << q.rho << ','
       << (q.mixed_sizes ? 1 : 0) << '\n';
  for (const FlowStat& f : rep.flows)
    os << "flow:" << f.s + 1 << ':' << f.e + 1 << ':' << f.n + 1 << ',' << f.analytic * 1e3 << ','
       << f.sim.mean * 1e3 << ',' << f.sim.stderr_ * 1e3 << ',' << f.sim.samples << ",,\n";
}

}  // namespace mecbend
