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

// Problem data for the cooperative edge/cloud placement problem.
//
// Servers are indexed n = 0..E-1 for base stations and n = E for the cloud.
// Services are indexed s = 0..S-1. All stored values are in canonical units
// (see units.hpp).

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mecbend {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Arrays whose sizes do not agree with the instance dimensions.
class IndexError : public Error {
 public:
  using Error::Error;
};

// A function was called outside its contract (e.g. a feasibility cut built
// from a feasible probe).
class ContractError : public Error {
 public:
  using Error::Error;
};

// An LP ran out of iterations or returned an unexpected status.
class NumericalError : public Error {
 public:
  using Error::Error;
};

struct Link {
  bool exists = false;
  double bandwidth = 0.0;    // B^l_en, bits/s
  double propagation = 0.0;  // d^prp_en, seconds
};

class Topology {
 public:
  Topology() = default;
  explicit Topology(int num_bs)
      : storage(num_bs, 0.0),
        compute(num_bs, 0.0),
        access_bandwidth(num_bs, 0.0),
        num_bs_(num_bs),
        links_(static_cast<std::size_t>(num_bs) * (num_bs + 1)) {
    for (int e = 0; e < num_bs; ++e) set_self_link(e);
  }

  int num_bs() const { return num_bs_; }
  int num_servers() const { return num_bs_ + 1; }
  int cloud() const { return num_bs_; }
  bool is_cloud(int n) const { return n == num_bs_; }

  const Link& link(int e, int n) const { return links_[index(e, n)]; }
  bool has_link(int e, int n) const { return link(e, n).exists; }

  // Directed link from BS e to server n (n != e).
  void set_link(int e, int n, double bandwidth, double propagation) {
    links_[index(e, n)] = Link{true, bandwidth, propagation};
  }
  void remove_link(int e, int n) { links_[index(e, n)] = Link{}; }

  // Self-links carry infinite bandwidth and zero delay; local service is
  // modelled as routing to n = e.
  void set_self_link(int e) { links_[index(e, e)] = Link{true, kInf, 0.0}; }

  std::vector<double> storage;           // C_e, bytes
  std::vector<double> compute;           // M_e, cycles/s
  std::vector<double> access_bandwidth;  // B_e, bits/s

 private:
  std::size_t index(int e, int n) const {
    return static_cast<std::size_t>(e) * (num_bs_ + 1) + n;
  }

  int num_bs_ = 0;
  std::vector<Link> links_;
};

struct Service {
  std::string name;
  std::string category;
  double size = 0.0;       // sigma_s, bytes per replica
  double output = 0.0;     // beta_s, bits per request
  double work = 0.0;       // nu_s, mean cycles per request
  double max_delay = 0.0;  // D^max_s, seconds
};

using ServiceCatalog = std::vector<Service>;

// lambda_es in requests/second, stored row-major [e][s].
class Demand {
 public:
  Demand() = default;
  Demand(int num_bs, int num_services)
      : num_bs_(num_bs),
        num_services_(num_services),
        rate_(static_cast<std::size_t>(num_bs) * num_services, 0.0) {}

  double operator()(int e, int s) const { return rate_[idx(e, s)]; }
  double& operator()(int e, int s) { return rate_[idx(e, s)]; }
  int num_bs() const { return num_bs_; }
  int num_services() const { return num_services_; }

 private:
  std::size_t idx(int e, int s) const {
    return static_cast<std::size_t>(e) * num_services_ + s;
  }
  int num_bs_ = 0;
  int num_services_ = 0;
  std::vector<double> rate_;
};

class PriceBook {
 public:
  PriceBook() = default;
  PriceBook(int num_bs, int num_services)
      : storage(num_bs + 1, 0.0),
        cpu(num_bs + 1, 0.0),
        num_bs_(num_bs),
        num_services_(num_services),
        transfer_(static_cast<std::size_t>(num_bs) * (num_bs + 1), 0.0),
        revenue_(static_cast<std::size_t>(num_bs + 1) * num_services, 0.0) {}

  // p^trn_en, dollars per bit sent from e to n.
  double transfer(int e, int n) const { return transfer_[e * (num_bs_ + 1) + n]; }
  double& transfer(int e, int n) { return transfer_[e * (num_bs_ + 1) + n]; }
  // w_ns, dollars per request of s served at n.
  double revenue(int n, int s) const { return revenue_[n * num_services_ + s]; }
  double& revenue(int n, int s) { return revenue_[n * num_services_ + s]; }

  int num_bs() const { return num_bs_; }
  int num_services() const { return num_services_; }

  std::vector<double> storage;  // p^str_n, dollars per byte per second
  std::vector<double> cpu;      // p^cpu_n, dollars per (cycle/s) per second

 private:
  int num_bs_ = 0;
  int num_services_ = 0;
  std::vector<double> transfer_;
  std::vector<double> revenue_;
};

struct SolverParams {
  double alpha = 0.5;  // share of D^max budgeted to network delay
  // Absolute convergence tolerance in dollars/second. When unset the solver
  // uses 1e-4 * max(1, |first lower bound|).
  std::optional<double> epsilon;
  int max_iterations = 500;
  double lp_tolerance = 1e-9;
  unsigned long long seed = 0;
};

struct Instance {
  Topology topology;
  ServiceCatalog services;
  Demand demand;
  PriceBook prices;
  SolverParams params;

  int num_bs() const { return topology.num_bs(); }
  int num_servers() const { return topology.num_servers(); }
  int num_services() const { return static_cast<int>(services.size()); }
  int cloud() const { return topology.cloud(); }
};

// Returns one human-readable entry per violated invariant; empty means the
// instance is well formed.
inline std::vector<std::string> validate(const Instance& inst) {
  std::vector<std::string> out;
  auto positive = [&](double v, const std::string& what) {
    if (!(v > 0.0)) out.push_back(what + " must be > 0");
  };
  auto nonneg = [&](double v, const std::string& what) {
    if (!(v >= 0.0)) out.push_back(what + " must be >= 0");
  };
  const int E = inst.num_bs();
  const int S = inst.num_services();
  if (E < 1) out.push_back("num_bs must be >= 1");
  if (S < 1) out.push_back("services must contain at least one entry");

  const auto& topo = inst.topology;
  if (static_cast<int>(topo.storage.size()) != E ||
      static_cast<int>(topo.compute.size()) != E ||
      static_cast<int>(topo.access_bandwidth.size()) != E) {
    out.push_back("topology capacity arrays must have num_bs entries");
    return out;
  }
  for (int e = 0; e < E; ++e) {
    const std::string tag = std::to_string(e + 1);
    positive(topo.storage[e], "C_" + tag);
    positive(topo.compute[e], "M_" + tag);
    positive(topo.access_bandwidth[e], "B_" + tag);
    if (!topo.has_link(e, topo.cloud())) {
      out.push_back("link " + tag + "→cloud required");
    }
    for (int n = 0; n < topo.num_servers(); ++n) {
      if (n == e || !topo.has_link(e, n)) continue;
      const Link& l = topo.link(e, n);
      const std::string name = "link " + tag + "→" +
                               (topo.is_cloud(n) ? std::string("cloud")
                                                 : std::to_string(n + 1));
      positive(l.bandwidth, name + " bandwidth");
      nonneg(l.propagation, name + " propagation");
      if (!topo.is_cloud(n) && !topo.has_link(n, e)) {
        out.push_back(name + " must be present in both directions");
      }
    }
  }

  for (int s = 0; s < S; ++s) {
    const Service& svc = inst.services[s];
    const std::string tag = "service " + std::to_string(s + 1);
    positive(svc.size, tag + " size");
    positive(svc.output, tag + " output");
    positive(svc.work, tag + " work");
    positive(svc.max_delay, tag + " max_delay");
  }

  if (inst.demand.num_bs() != E || inst.demand.num_services() != S) {
    out.push_back("demand dimensions must be num_bs x services");
  } else {
    for (int e = 0; e < E; ++e)
      for (int s = 0; s < S; ++s)
        nonneg(inst.demand(e, s), "lambda_" + std::to_string(e + 1) + "," +
                                      std::to_string(s + 1));
  }

  const auto& p = inst.prices;
  if (p.num_bs() != E || p.num_services() != S ||
      static_cast<int>(p.storage.size()) != E + 1 ||
      static_cast<int>(p.cpu.size()) != E + 1) {
    out.push_back("price book dimensions must match the topology and services");
  } else {
    for (int n = 0; n <= E; ++n) {
      nonneg(p.storage[n], "p_str_" + std::to_string(n + 1));
      nonneg(p.cpu[n], "p_cpu_" + std::to_string(n + 1));
      for (int s = 0; s < S; ++s)
        nonneg(p.revenue(n, s),
               "w_" + std::to_string(n + 1) + "," + std::to_string(s + 1));
    }
    for (int e = 0; e < E; ++e)
      for (int n = 0; n <= E; ++n)
        nonneg(p.transfer(e, n),
               "p_trn_" + std::to_string(e + 1) + "," + std::to_string(n + 1));
  }

  const auto& prm = inst.params;
  if (!(prm.alpha >= 0.0 && prm.alpha <= 1.0)) out.push_back("alpha must be in [0,1]");
  if (prm.epsilon && !(*prm.epsilon >= 0.0)) out.push_back("epsilon must be >= 0");
  if (!(prm.lp_tolerance > 0.0)) out.push_back("lp_tolerance must be > 0");
  if (prm.max_iterations < 1) out.push_back("max_iterations must be >= 1");
  return out;
}

}  // namespace mecbend
