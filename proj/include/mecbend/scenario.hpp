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

// Seeded instance generators.
//
// Every random entity (base station, service, per-BS demand ranking) draws
// from its own sub-stream derived from (seed, tag, index), so the first E
// base stations and the first S services are identical across instances
// generated with larger E or S.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mecbend/model.hpp"
#include "mecbend/random.hpp"
#include "mecbend/units.hpp"

namespace mecbend {

struct Range {
  double lo;
  double hi;
};

struct ServiceCategory {
  const char* name;
  Range size_gb;
  Range work_mcycles;
  Range output_mb;
};

inline const std::array<ServiceCategory, 4>& service_categories() {
  static const std::array<ServiceCategory, 4> cats{{
      {"FR", {2.0, 10.0}, {0.375, 3.0}, {1.0, 8.0}},
      {"GZIP", {0.02, 0.02}, {0.04, 0.32}, {1.0, 6.0}},
      {"AR", {2.0, 20.0}, {0.375, 3.0}, {1.0, 6.0}},
      {"VS", {1.0, 10.0}, {0.0001, 0.0001}, {1.0, 25.0}},
  }};
  return cats;
}

// External units as in the field names.
struct GeneratorConfig {
  int num_bs = 10;
  int num_services = 3000;
  double region_m = 500.0;
  double link_radius_m = 150.0;
  bool full_mesh = false;  // link every BS pair regardless of distance

  double storage_gb = 100.0;
  double compute_ghz = 20.0;
  double access_mbps = 100.0;
  double inter_bs_mbps = 1000.0;
  double cloud_mbps = 500.0;
  double inter_bs_delay_ms = 0.0005;
  double cloud_delay_ms = 50.0;

  double max_delay_ms = 400.0;
  double demand_rps = 10.0;
  double zipf_exponent = 0.8;

  double storage_price_gb_month = 0.2;
  double cpu_price_ghz_hour = 0.4;
  double inter_bs_transfer_mbps_hour = 0.2;
  double cloud_transfer_mbps_hour = 0.5;
  Range omega{4.0, 7.0};
  double revenue_per_mb_hour = 3.0;  // w_ns = 3 beta_s (Mb), $/hour per request/second

  double alpha = 0.5;
  std::uint64_t seed = 1;
};

inline GeneratorConfig preset(const std::string& name) {
  GeneratorConfig c;
  if (name == "paper") return c;
  if (name == "desk") {
    c.num_bs = 3;
    c.num_services = 6;
    c.region_m = 250.0;
    return c;
  }
  throw Error("unknown preset '" + name + "'");
}

inline std::vector<std::string> validate(const GeneratorConfig& c) {
  std::vector<std::string> out;
  if (c.num_bs < 1) out.push_back("num_bs must be >= 1");
  if (c.num_services < 1) out.push_back("num_services must be >= 1");
  auto pos = [&](double v, const char* what) {
    if (!(v > 0.0)) out.push_back(std::string(what) + " must be > 0");
  };
  auto nonneg = [&](double v, const char* what) {
    if (!(v >= 0.0)) out.push_back(std::string(what) + " must be >= 0");
  };
  pos(c.region_m, "region_m");
  nonneg(c.link_radius_m, "link_radius_m");
  pos(c.storage_gb, "storage_gb");
  pos(c.compute_ghz, "compute_ghz");
  pos(c.access_mbps, "access_mbps");
  pos(c.inter_bs_mbps, "inter_bs_mbps");
  pos(c.cloud_mbps, "cloud_mbps");
  nonneg(c.inter_bs_delay_ms, "inter_bs_delay_ms");
  nonneg(c.cloud_delay_ms, "cloud_delay_ms");
  pos(c.max_delay_ms, "max_delay_ms");
  nonneg(c.demand_rps, "demand_rps");
  nonneg(c.zipf_exponent, "zipf_exponent");
  nonneg(c.storage_price_gb_month, "storage_price_gb_month");
  nonneg(c.cpu_price_ghz_hour, "cpu_price_ghz_hour");
  nonneg(c.inter_bs_transfer_mbps_hour, "inter_bs_transfer_mbps_hour");
  nonneg(c.cloud_transfer_mbps_hour, "cloud_transfer_mbps_hour");
  nonneg(c.revenue_per_mb_hour, "revenue_per_mb_hour");
  if (!(c.omega.lo <= c.omega.hi) || !(c.omega.lo >= 0.0)) out.push_back("omega range is empty");
  if (!(c.alpha >= 0.0 && c.alpha <= 1.0)) out.push_back("alpha must be in [0,1]");
  return out;
}

// Normalized Zipf weights for ranks 1..k.
inline std::vector<double> zipf_weights(int k, double exponent) {
  std::vector<double> w(k);
  double sum = 0.0;
  for (int r = 0; r < k; ++r) sum += w[r] = std::pow(static_cast<double>(r + 1), -exponent);
  for (double& v : w) v /= sum;
  return w;
}

inline Instance generate(const GeneratorConfig& cfg) {
  const auto problems = validate(cfg);
  if (!problems.empty()) throw Error("invalid generator config: " + problems.front());
  namespace u = units;
  enum : std::uint64_t { kTagBs = 1, kTagService = 2, kTagRanking = 3 };
  const int E = cfg.num_bs;
  const int S = cfg.num_services;
  const auto& cats = service_categories();

  Instance inst;
  inst.topology = Topology(E);
  std::vector<double> px(E), py(E), omega(E);
  for (int e = 0; e < E; ++e) {
    Stream st(cfg.seed, kTagBs, e);
    px[e] = st.uniform(0.0, cfg.region_m);
    py[e] = st.uniform(0.0, cfg.region_m);
    omega[e] = st.uniform(cfg.omega.lo, cfg.omega.hi);
    inst.topology.storage[e] = u::kGigabyte.to_canonical(cfg.storage_gb);
    inst.topology.compute[e] = u::kGHz.to_canonical(cfg.compute_ghz);
    inst.topology.access_bandwidth[e] = u::kMbps.to_canonical(cfg.access_mbps);
    inst.topology.set_link(e, E, u::kMbps.to_canonical(cfg.cloud_mbps),
                           u::kMillisecond.to_canonical(cfg.cloud_delay_ms));
  }
  for (int e = 0; e < E; ++e)
    for (int n = 0; n < E; ++n) {
      if (n == e) continue;
      const double dist = std::hypot(px[e] - px[n], py[e] - py[n]);
      if (cfg.full_mesh || dist < cfg.link_radius_m)
        inst.topology.set_link(e, n, u::kMbps.to_canonical(cfg.inter_bs_mbps),
                               u::kMillisecond.to_canonical(cfg.inter_bs_delay_ms));
    }

  std::vector<int> category(S);
  inst.services.resize(S);
  for (int s = 0; s < S; ++s) {
    Stream st(cfg.seed, kTagService, s);
    category[s] = st.index(static_cast<int>(cats.size()));
    const ServiceCategory& c = cats[category[s]];
    Service& svc = inst.services[s];
    svc.name = std::string(c.name) + "-" + std::to_string(s + 1);
    svc.category = c.name;
    svc.size = u::kGigabyte.to_canonical(st.uniform(c.size_gb.lo, c.size_gb.hi));
    svc.work = u::kMegacycles.to_canonical(st.uniform(c.work_mcycles.lo, c.work_mcycles.hi));
    svc.output = u::kMegabit.to_canonical(st.uniform(c.output_mb.lo, c.output_mb.hi));
    svc.max_delay = u::kMillisecond.to_canonical(cfg.max_delay_ms);
  }

  // Demand: lambda_e split evenly over the non-empty categories, Zipf within
  // each category with ranks permuted independently per BS.
  std::vector<std::vector<int>> members(cats.size());
  for (int s = 0; s < S; ++s) members[category[s]].push_back(s);
  int nonempty = 0;
  for (const auto& m : members) nonempty += !m.empty();
  inst.demand = Demand(E, S);
  for (int e = 0; e < E; ++e) {
    Stream st(cfg.seed, kTagRanking, e);
    for (const auto& m : members) {
      if (m.empty()) continue;
      const int k = static_cast<int>(m.size());
      std::vector<int> rank(k);
      for (int i = 0; i < k; ++i) rank[i] = i;
      for (int i = k - 1; i > 0; --i) std::swap(rank[i], rank[st.index(i + 1)]);
      const std::vector<double> w = zipf_weights(k, cfg.zipf_exponent);
      for (int i = 0; i < k; ++i)
        inst.demand(e, m[i]) = cfg.demand_rps / nonempty * w[rank[i]];
    }
  }

  inst.prices = PriceBook(E, S);
  const double str = u::kPerGbMonth.to_canonical(cfg.storage_price_gb_month);
  const double cpu = u::kPerGhzHour.to_canonical(cfg.cpu_price_ghz_hour);
  for (int e = 0; e < E; ++e) {
    inst.prices.storage[e] = str * omega[e];
    inst.prices.cpu[e] = cpu * omega[e];
    for (int n = 0; n <= E; ++n) {
      if (n == e) continue;
      const double p = n == E ? cfg.cloud_transfer_mbps_hour : cfg.inter_bs_transfer_mbps_hour;
      inst.prices.transfer(e, n) = u::kPerMbpsHour.to_canonical(p);
    }
  }
  inst.prices.storage[E] = str;
  inst.prices.cpu[E] = cpu;
  for (int n = 0; n <= E; ++n)
    for (int s = 0; s < S; ++s) {
      const double beta_mb = u::kMegabit.from_canonical(inst.services[s].output);
      inst.prices.revenue(n, s) = u::kPerRpsHour.to_canonical(cfg.revenue_per_mb_hour * beta_mb);
    }

  inst.params.alpha = cfg.alpha;
  inst.params.seed = cfg.seed;
  return inst;
}

// Special instance whose optimum equals a 0-1 multiple knapsack optimum:
// services are items (size = weight, total demand = value), base stations
// are knapsacks. Prices are zero, revenue is one per request, inter-BS links
// have zero delay and the cloud is out of delay reach. Every capacity that
// should not bind is `slack_factor` times the largest load it could carry.
inline Instance make_sp_instance(const std::vector<double>& values,
                                 const std::vector<double>& weights,
                                 const std::vector<double>& capacities,
                                 double slack_factor = 1e6) {
  if (values.size() != weights.size()) throw Error("values and weights differ in length");
  const int S = static_cast<int>(values.size());
  const int E = static_cast<int>(capacities.size());
  if (S < 1 || E < 1) throw Error("need at least one item and one knapsack");
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!(values[i] >= 0.0) || !(weights[i] > 0.0)) throw Error("item values must be >= 0, weights > 0");
  for (double c : capacities)
    if (!(c >= 0.0)) throw Error("knapsack capacities must be >= 0");

  Instance inst;
  inst.params.alpha = 0.5;
  const double D = 1.0;
  double total_value = 0.0;
  for (double v : values) total_value += v;
  // beta = nu = 1: the largest possible bit rate / request rate / work rate.
  const double binding = total_value + S * (1.0 / ((1.0 - inst.params.alpha) * D)) + 1.0;
  const double big = slack_factor * binding;

  // Storage capacities must be positive; a zero knapsack becomes one that no
  // item fits into.
  double min_weight = kInf;
  for (double w : weights) min_weight = std::min(min_weight, w);
  inst.topology = Topology(E);
  for (int e = 0; e < E; ++e) {
    inst.topology.storage[e] = capacities[e] > 0.0 ? capacities[e] : 0.5 * min_weight;
    inst.topology.compute[e] = big;
    inst.topology.access_bandwidth[e] = big;
    inst.topology.set_link(e, E, big, 2.0 * D);
    for (int n = 0; n < E; ++n)
      if (n != e) inst.topology.set_link(e, n, big, 0.0);
  }
  inst.services.resize(S);
  for (int s = 0; s < S; ++s) {
    Service& svc = inst.services[s];
    svc.name = "item-" + std::to_string(s + 1);
    svc.category = "item";
    svc.size = weights[s];
    svc.output = 1.0;
    svc.work = 1.0;
    svc.max_delay = D;
  }
  inst.demand = Demand(E, S);
  for (int e = 0; e < E; ++e)
    for (int s = 0; s < S; ++s) inst.demand(e, s) = values[s] / E;
  inst.prices = PriceBook(E, S);
  for (int n = 0; n <= E; ++n)
    for (int s = 0; s < S; ++s) inst.prices.revenue(n, s) = 1.0;
  return inst;
}

}  // namespace mecbend
