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

// JSON files: instances, solutions, run reports, and run manifests.
//
// Instance fields carry their unit in the name and are converted to the
// canonical units on load. Saving uses the exact inverse conversion, so
// load -> save -> load gives identical values. Server indices are 0-based,
// with the cloud written as "cloud" (links) or as the last entry (arrays
// over servers).

#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "mecbend/baselines.hpp"
#include "mecbend/cuts.hpp"
#include "mecbend/formulation.hpp"
#include "mecbend/gbd.hpp"
#include "mecbend/model.hpp"
#include "mecbend/units.hpp"

namespace mecbend {

using json = nlohmann::json;

inline constexpr const char* kToolVersion = "mecbend 1.0.0";

// ---------------------------------------------------------------------------
// Hashing

inline std::uint64_t fnv1a(const void* data, std::size_t len,
                           std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a(const std::string& s) { return fnv1a(s.data(), s.size()); }

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

// Hash over the bit patterns of X, Z, Y, U.
inline std::string solution_hash(const Solution& sol) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a(sol.x.data(), sol.x.size(), h);
  h = fnv1a(sol.z.data(), sol.z.size(), h);
  for (double v : sol.y) h = fnv1a(&v, sizeof v, h);
  for (double v : sol.u) h = fnv1a(&v, sizeof v, h);
  return hex64(h);
}

struct Manifest {
  std::string command;
  std::string config_hash;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> outputs;
  std::string tool_version = kToolVersion;

  json to_json() const {
    return json{{"command", command},   {"config_hash", config_hash}, {"seeds", seeds},
                {"outputs", outputs},   {"tool_version", tool_version}};
  }
  std::string hash() const { return hex64(fnv1a(to_json().dump())); }
};

// ---------------------------------------------------------------------------
// Instance

namespace detail {

inline double get_num(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(std::string("missing field '") + key + "'");
  if (!j.at(key).is_number()) throw Error(std::string("field '") + key + "' is not a number");
  return j.at(key).get<double>();
}

inline json server_key(int n, int E) { return n == E ? json("cloud") : json(n); }

inline int parse_server(const json& j, int E) {
  if (j.is_string() && j.get<std::string>() == "cloud") return E;
  if (!j.is_number_integer()) throw Error("server index must be an integer or \"cloud\"");
  const int n = j.get<int>();
  if (n < 0 || n >= E) throw IndexError("server index out of range");
  return n;
}

}  // namespace detail

inline json instance_to_json(const Instance& inst) {
  namespace u = units;
  const int E = inst.num_bs(), S = inst.num_services();
  json j;
  j["format"] = "mecbend-instance";
  j["version"] = 1;

  json bs = json::array();
  for (int e = 0; e < E; ++e)
    bs.push_back({{"storage_gb", u::kGigabyte.from_canonical(inst.topology.storage[e])},
                  {"compute_ghz", u::kGHz.from_canonical(inst.topology.compute[e])},
                  {"access_bandwidth_mbps",
                   u::kMbps.from_canonical(inst.topology.access_bandwidth[e])}});
  json links = json::array();
  for (int e = 0; e < E; ++e)
    for (int n = 0; n <= E; ++n) {
      if (n == e || !inst.topology.has_link(e, n)) continue;
      const Link& l = inst.topology.link(e, n);
      links.push_back({{"from", e},
                       {"to", detail::server_key(n, E)},
                       {"bandwidth_mbps", u::kMbps.from_canonical(l.bandwidth)},
                       {"propagation_ms", u::kMillisecond.from_canonical(l.propagation)}});
    }
  j["topology"] = {{"num_bs", E}, {"base_stations", bs}, {"links", links}};

  json svc = json::array();
  for (const Service& s : inst.services)
    svc.push_back({{"name", s.name},
                   {"category", s.category},
                   {"size_gb", u::kGigabyte.from_canonical(s.size)},
                   {"output_mb", u::kMegabit.from_canonical(s.output)},
                   {"work_mcycles", u::kMegacycles.from_canonical(s.work)},
                   {"max_delay_ms", u::kMillisecond.from_canonical(s.max_delay)}});
  j["services"] = svc;

  json rate = json::array();
  for (int e = 0; e < E; ++e) {
    json row = json::array();
    for (int s = 0; s < S; ++s) row.push_back(inst.demand(e, s));
    rate.push_back(row);
  }
  j["demand"] = {{"rate_rps", rate}};

  json str = json::array(), cpu = json::array(), trn = json::array(), rev = json::array();
  for (int n = 0; n <= E; ++n) {
    str.push_back(u::kPerGbMonth.from_canonical(inst.prices.storage[n]));
    cpu.push_back(u::kPerGhzHour.from_canonical(inst.prices.cpu[n]));
    json r = json::array();
    for (int s = 0; s < S; ++s) r.push_back(u::kPerRpsHour.from_canonical(inst.prices.revenue(n, s)));
    rev.push_back(r);
  }
  for (int e = 0; e < E; ++e) {
    json r = json::array();
    for (int n = 0; n <= E; ++n) r.push_back(u::kPerMbpsHour.from_canonical(inst.prices.transfer(e, n)));
    trn.push_back(r);
  }
  j["prices"] = {{"storage_per_gb_month", str},
                 {"cpu_per_ghz_hour", cpu},
                 {"transfer_per_mbps_hour", trn},
                 {"revenue_per_rps_hour", rev}};

  const SolverParams& p = inst.params;
  j["params"] = {{"alpha", p.alpha},
                 {"epsilon_usd_per_s", p.epsilon ? json(*p.epsilon) : json(nullptr)},
                 {"max_iterations", p.max_iterations},
                 {"lp_tolerance", p.lp_tolerance},
                 {"seed", p.seed}};
  return j;
}

inline Instance instance_from_json(const json& j) {
  namespace u = units;
  try {
    const json& topo = j.at("topology");
    const int E = topo.at("num_bs").get<int>();
    if (E < 1) throw Error("num_bs must be >= 1");
    const json& bs = topo.at("base_stations");
    if (!bs.is_array() || static_cast<int>(bs.size()) != E)
      throw Error("base_stations must have num_bs entries");
    Instance inst;
    inst.topology = Topology(E);
    for (int e = 0; e < E; ++e) {
      inst.topology.storage[e] = u::kGigabyte.to_canonical(detail::get_num(bs[e], "storage_gb"));
      inst.topology.compute[e] = u::kGHz.to_canonical(detail::get_num(bs[e], "compute_ghz"));
      inst.topology.access_bandwidth[e] =
          u::kMbps.to_canonical(detail::get_num(bs[e], "access_bandwidth_mbps"));
    }
    for (const json& l : topo.at("links")) {
      const int e = detail::parse_server(l.at("from"), E);
      if (e == E) throw Error("links must start at a base station");
      const int n = detail::parse_server(l.at("to"), E);
      if (n == e) throw Error("self links are implicit");
      inst.topology.set_link(e, n, u::kMbps.to_canonical(detail::get_num(l, "bandwidth_mbps")),
                             u::kMillisecond.to_canonical(detail::get_num(l, "propagation_ms")));
    }
    for (const json& s : j.at("services")) {
      Service svc;
      svc.name = s.value("name", "");
      svc.category = s.value("category", "");
      svc.size = u::kGigabyte.to_canonical(detail::get_num(s, "size_gb"));
      svc.output = u::kMegabit.to_canonical(detail::get_num(s, "output_mb"));
      svc.work = u::kMegacycles.to_canonical(detail::get_num(s, "work_mcycles"));
      svc.max_delay = u::kMillisecond.to_canonical(detail::get_num(s, "max_delay_ms"));
      inst.services.push_back(std::move(svc));
    }
    const int S = inst.num_services();
    const json& rate = j.at("demand").at("rate_rps");
    if (static_cast<int>(rate.size()) != E) throw Error("demand must have num_bs rows");
    inst.demand = Demand(E, S);
    for (int e = 0; e < E; ++e) {
      if (static_cast<int>(rate[e].size()) != S) throw Error("demand rows must have one entry per service");
      for (int s = 0; s < S; ++s) inst.demand(e, s) = rate[e][s].get<double>();
    }
    const json& pr = j.at("prices");
    inst.prices = PriceBook(E, S);
    const json& str = pr.at("storage_per_gb_month");
    const json& cpu = pr.at("cpu_per_ghz_hour");
    const json& trn = pr.at("transfer_per_mbps_hour");
    const json& rev = pr.at("revenue_per_rps_hour");
    if (static_cast<int>(str.size()) != E + 1 || static_cast<int>(cpu.size()) != E + 1 ||
        static_cast<int>(trn.size()) != E || static_cast<int>(rev.size()) != E + 1)
      throw Error("price arrays do not match the topology");
    for (int n = 0; n <= E; ++n) {
      inst.prices.storage[n] = u::kPerGbMonth.to_canonical(str[n].get<double>());
      inst.prices.cpu[n] = u::kPerGhzHour.to_canonical(cpu[n].get<double>());
      if (static_cast<int>(rev[n].size()) != S) throw Error("revenue rows must have one entry per service");
      for (int s = 0; s < S; ++s)
        inst.prices.revenue(n, s) = u::kPerRpsHour.to_canonical(rev[n][s].get<double>());
    }
    for (int e = 0; e < E; ++e) {
      if (static_cast<int>(trn[e].size()) != E + 1) throw Error("transfer rows must have num_bs+1 entries");
      for (int n = 0; n <= E; ++n)
        inst.prices.transfer(e, n) = u::kPerMbpsHour.to_canonical(trn[e][n].get<double>());
    }
    if (j.contains("params")) {
      const json& p = j.at("params");
      inst.params.alpha = p.value("alpha", inst.params.alpha);
      if (p.contains("epsilon_usd_per_s") && !p.at("epsilon_usd_per_s").is_null())
        inst.params.epsilon = p.at("epsilon_usd_per_s").get<double>();
      inst.params.max_iterations = p.value("max_iterations", inst.params.max_iterations);
      inst.params.lp_tolerance = p.value("lp_tolerance", inst.params.lp_tolerance);
      inst.params.seed = p.value("seed", inst.params.seed);
    }
    return inst;
  } catch (const json::exception& ex) {
    throw Error(std::string("malformed instance: ") + ex.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& ex) {
    throw Error(what + ": " + ex.what());
  }
}

inline Instance load_instance(const std::string& path) {
  return instance_from_json(parse_json(read_file(path), path));
}

inline void save_instance(const std::string& path, const Instance& inst) {
  write_file(path, instance_to_json(inst).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Solution

inline json solution_to_json(const Instance& inst, const Solution& sol) {
  const Dims d(inst);
  check_dims(d, sol);
  json j;
  j["format"] = "mecbend-solution";
  j["num_bs"] = d.E;
  j["num_services"] = d.S;
  json x = json::array();
  for (int n = 0; n < d.servers(); ++n) {
    json row = json::array();
    for (int s = 0; s < d.S; ++s) row.push_back(static_cast<int>(sol.x[d.x(n, s)]));
    x.push_back(row);
  }
  j["x"] = x;
  json z = json::array();
  for (std::uint8_t v : sol.z) z.push_back(static_cast<int>(v));
  j["z"] = z;
  json y = json::array(), u = json::array();
  for (int i = 0; i < d.num_flows(); ++i)
    if (sol.y[i] != 0.0) y.push_back(json::array({i, sol.y[i]}));
  for (int i = 0; i < d.num_x(); ++i)
    if (sol.u[i] != 0.0) u.push_back(json::array({i, sol.u[i]}));
  j["y"] = y;
  j["u_cycles_per_s"] = u;
  const ProfitBreakdown p = profit(inst, sol);
  j["profit_usd_per_s"] = {{"revenue", p.revenue},
                           {"storage", p.storage},
                           {"cpu", p.cpu},
                           {"transfer", p.transfer},
                           {"total", p.total}};
  j["hit_ratio"] = hit_ratio(inst, sol);
  j["mean_delay_ms"] = mean_delay(inst, sol) * 1e3;
  json flows = json::array();
  for (const FlowDelay& f : flow_delays(inst, sol))
    flows.push_back({{"s", f.s},
                     {"e", f.e},
                     {"n", detail::server_key(f.n, d.E)},
                     {"y", sol.y[d.flow(f.s, f.e, f.n)]},
                     {"service_ms", f.service * 1e3},
                     {"propagation_ms", f.propagation * 1e3},
                     {"congestion_ms", f.congestion * 1e3},
                     {"total_ms", f.total() * 1e3},
                     {"max_delay_ms", inst.services[f.s].max_delay * 1e3}});
  j["flows"] = flows;
  j["hash"] = solution_hash(sol);
  return j;
}

inline Solution solution_from_json(const Instance& inst, const json& j) {
  const Dims d(inst);
  try {
    if (j.at("num_bs").get<int>() != d.E || j.at("num_services").get<int>() != d.S)
      throw Error("solution does not match the instance dimensions");
    Solution sol = empty_solution(d);
    const json& x = j.at("x");
    if (static_cast<int>(x.size()) != d.servers()) throw Error("x must have one row per server");
    for (int n = 0; n < d.servers(); ++n) {
      if (static_cast<int>(x[n].size()) != d.S) throw Error("x rows must have one entry per service");
      for (int s = 0; s < d.S; ++s) sol.x[d.x(n, s)] = x[n][s].get<int>() != 0;
    }
    const json& z = j.at("z");
    if (static_cast<int>(z.size()) != d.num_flows()) throw Error("z has the wrong length");
    for (int i = 0; i < d.num_flows(); ++i) sol.z[i] = z[i].get<int>() != 0;
    for (const json& e : j.at("y")) {
      const int i = e.at(0).get<int>();
      if (i < 0 || i >= d.num_flows()) throw IndexError("y index out of range");
      sol.y[i] = e.at(1).get<double>();
    }
    for (const json& e : j.at("u_cycles_per_s")) {
      const int i = e.at(0).get<int>();
      if (i < 0 || i >= d.num_x()) throw IndexError("u index out of range");
      sol.u[i] = e.at(1).get<double>();
    }
    return sol;
  } catch (const json::exception& ex) {
    throw Error(std::string("malformed solution: ") + ex.what());
  }
}

// ---------------------------------------------------------------------------
// Run report

inline json trace_to_json(const std::vector<TraceRow>& trace) {
  json a = json::array();
  for (const TraceRow& r : trace)
    a.push_back({{"iter", r.iter},
                 {"lb", r.lb},
                 {"ub", std::isfinite(r.ub) ? json(r.ub) : json(nullptr)},
                 {"inner_status", to_string(r.inner_status)},
                 {"cut_kind", r.cut_kind ? to_string(*r.cut_kind) : "none"},
                 {"tau_feas", r.tau_feas},
                 {"tau_infeas", r.tau_infeas},
                 {"master_nodes", r.master_nodes},
                 {"wall_ms", r.wall_ms}});
  return a;
}

inline json cuts_to_json(const std::vector<Cut>& cuts) {
  json a = json::array();
  for (const Cut& c : cuts) {
    json cx = json::array(), cz = json::array();
    for (const auto& [i, v] : c.coeff_x) cx.push_back(json::array({i, v}));
    for (const auto& [i, v] : c.coeff_z) cz.push_back(json::array({i, v}));
    a.push_back({{"kind", to_string(c.kind)},
                 {"iteration", c.iteration},
                 {"constant", c.constant},
                 {"coeff_x", cx},
                 {"coeff_z", cz}});
  }
  return a;
}

inline std::string format_trace_csv(const std::vector<TraceRow>& trace, const std::string& manifest) {
  std::ostringstream os;
  write_trace_csv(os, trace, manifest);
  return os.str();
}

}  // namespace mecbend
