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

// mecbend: generate, solve, simulate, bench, report.
//
// Exit codes: 0 success, 2 usage error or missing input, 3 iteration limit,
// 4 infeasible, 1 any other failure.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "mecbend/baselines.hpp"
#include "mecbend/gbd.hpp"
#include "mecbend/io.hpp"
#include "mecbend/queuesim.hpp"
#include "mecbend/scenario.hpp"

namespace fs = std::filesystem;
using namespace mecbend;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIterationLimit = 3;
constexpr int kExitInfeasible = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MECBEND_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return static_cast<int>(n);
}

std::string config_hash(const json& cfg) { return hex64(fnv1a(cfg.dump())); }

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory '" + dir + "': " + ec.message());
}

void write_manifest(const std::string& dir, const Manifest& m) {
  json j = m.to_json();
  j["hash"] = m.hash();
  write_file((fs::path(dir) / "manifest.json").string(), j.dump(2) + "\n");
}

Instance read_instance(const std::string& path) {
  if (!fs::exists(path)) throw UsageError("no such file: " + path);
  return load_instance(path);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);) out.push_back(item);
  return out;
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string preset = "desk";
  std::string config;
  int bs = -1;
  int services = -1;
  std::uint64_t seed = 1;
  double alpha = -1.0;
  bool full_mesh = false;
  std::string out = ".";
};

GeneratorConfig build_config(const GenerateArgs& a) {
  GeneratorConfig c = preset(a.preset);
  if (!a.config.empty()) {
    if (!fs::exists(a.config)) throw UsageError("no such file: " + a.config);
    const json j = parse_json(read_file(a.config), a.config);
    auto num = [&](const char* k, double& v) {
      if (j.contains(k)) v = j.at(k).get<double>();
    };
    if (j.contains("num_bs")) c.num_bs = j.at("num_bs").get<int>();
    if (j.contains("num_services")) c.num_services = j.at("num_services").get<int>();
    num("region_m", c.region_m);
    num("link_radius_m", c.link_radius_m);
    num("storage_gb", c.storage_gb);
    num("compute_ghz", c.compute_ghz);
    num("access_mbps", c.access_mbps);
    num("inter_bs_mbps", c.inter_bs_mbps);
    num("cloud_mbps", c.cloud_mbps);
    num("inter_bs_delay_ms", c.inter_bs_delay_ms);
    num("cloud_delay_ms", c.cloud_delay_ms);
    num("max_delay_ms", c.max_delay_ms);
    num("demand_rps", c.demand_rps);
    num("zipf_exponent", c.zipf_exponent);
    num("storage_price_gb_month", c.storage_price_gb_month);
    num("cpu_price_ghz_hour", c.cpu_price_ghz_hour);
    num("inter_bs_transfer_mbps_hour", c.inter_bs_transfer_mbps_hour);
    num("cloud_transfer_mbps_hour", c.cloud_transfer_mbps_hour);
    num("omega_min", c.omega.lo);
    num("omega_max", c.omega.hi);
    num("revenue_per_mb_hour", c.revenue_per_mb_hour);
    num("alpha", c.alpha);
    if (j.contains("full_mesh")) c.full_mesh = j.at("full_mesh").get<bool>();
  }
  if (a.bs > 0) c.num_bs = a.bs;
  if (a.services > 0) c.num_services = a.services;
  if (a.alpha >= 0.0) c.alpha = a.alpha;
  if (a.full_mesh) c.full_mesh = true;
  c.seed = a.seed;
  const auto problems = validate(c);
  if (!problems.empty()) throw UsageError(problems.front());
  return c;
}

json config_json(const GeneratorConfig& c, const std::string& preset_name) {
  return json{{"preset", preset_name},
              {"num_bs", c.num_bs},
              {"num_services", c.num_services},
              {"region_m", c.region_m},
              {"link_radius_m", c.link_radius_m},
              {"full_mesh", c.full_mesh},
              {"storage_gb", c.storage_gb},
              {"compute_ghz", c.compute_ghz},
              {"access_mbps", c.access_mbps},
              {"inter_bs_mbps", c.inter_bs_mbps},
              {"cloud_mbps", c.cloud_mbps},
              {"inter_bs_delay_ms", c.inter_bs_delay_ms},
              {"cloud_delay_ms", c.cloud_delay_ms},
              {"max_delay_ms", c.max_delay_ms},
              {"demand_rps", c.demand_rps},
              {"zipf_exponent", c.zipf_exponent},
              {"storage_price_gb_month", c.storage_price_gb_month},
              {"cpu_price_ghz_hour", c.cpu_price_ghz_hour},
              {"inter_bs_transfer_mbps_hour", c.inter_bs_transfer_mbps_hour},
              {"cloud_transfer_mbps_hour", c.cloud_transfer_mbps_hour},
              {"omega_min", c.omega.lo},
              {"omega_max", c.omega.hi},
              {"revenue_per_mb_hour", c.revenue_per_mb_hour},
              {"alpha", c.alpha},
              {"seed", c.seed}};
}

int cmd_generate(const GenerateArgs& a) {
  const GeneratorConfig c = build_config(a);
  const Instance inst = generate(c);
  ensure_dir(a.out);
  const std::string path = (fs::path(a.out) / "instance.json").string();
  Manifest m;
  m.command = "generate";
  m.config_hash = config_hash(config_json(c, a.preset));
  m.seeds = {c.seed};
  m.outputs = {"instance.json"};
  json j = instance_to_json(inst);
  j["manifest"] = m.hash();
  write_file(path, j.dump(2) + "\n");
  write_manifest(a.out, m);
  std::cout << "wrote " << path << " (E=" << inst.num_bs() << ", S=" << inst.num_services()
            << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SolveArgs {
  std::string instance;
  std::string method = "gbd";
  double alpha = -1.0;
  double epsilon = -1.0;
  int max_iter = -1;
  std::uint64_t seed = 0;
  bool no_timing = false;
  bool node_log = false;
  std::string out = ".";
};

int exit_code(GbdStatus s) {
  switch (s) {
    case GbdStatus::kConverged: return kExitOk;
    case GbdStatus::kIterationLimit: return kExitIterationLimit;
    case GbdStatus::kInfeasible: return kExitInfeasible;
  }
  return kExitFailure;
}

int cmd_solve(const SolveArgs& a) {
  Instance inst = read_instance(a.instance);
  if (a.alpha >= 0.0) inst.params.alpha = a.alpha;
  if (a.epsilon >= 0.0) inst.params.epsilon = a.epsilon;
  if (a.max_iter > 0) inst.params.max_iterations = a.max_iter;
  if (a.seed != 0) inst.params.seed = a.seed;
  const auto problems = validate(inst);
  if (!problems.empty()) throw UsageError("invalid instance: " + problems.front());
  ensure_dir(a.out);

  Manifest m;
  m.command = "solve --method " + a.method;
  m.config_hash = config_hash(json{{"instance", hex64(fnv1a(read_file(a.instance)))},
                                   {"method", a.method},
                                   {"alpha", inst.params.alpha},
                                   {"epsilon", inst.params.epsilon ? json(*inst.params.epsilon)
                                                                   : json(nullptr)},
                                   {"max_iterations", inst.params.max_iterations}});
  m.seeds = {inst.params.seed};
  m.outputs = {"solution.json", "report.json"};
  if (a.method == "gbd") m.outputs.push_back("trace.csv");
  if (a.node_log) m.outputs.push_back("master_nodes.csv");
  const std::string mh = m.hash();

  json report;
  report["manifest"] = mh;
  report["method"] = a.method;
  report["non_paper"] = a.method == "rr";
  BaselineReport rep;
  std::ofstream node_log;
  if (a.method == "gbd") {
    GbdOptions opt;
    opt.record_timing = !a.no_timing;
    if (a.node_log) {
      node_log.open((fs::path(a.out) / "master_nodes.csv").string());
      opt.master.node_log = &node_log;
    }
    const GbdResult r = solve_gbd(inst, opt);
    rep.name = "gbd";
    rep.solution = r.solution;
    rep.status = r.status;
    rep.profit = profit(inst, r.solution).total;
    write_file((fs::path(a.out) / "trace.csv").string(), format_trace_csv(r.trace, mh));
    report["status"] = to_string(r.status);
    report["iterations"] = r.iterations;
    report["lb"] = r.lb;
    report["ub"] = std::isfinite(r.ub) ? json(r.ub) : json(nullptr);
    report["epsilon"] = r.epsilon;
    report["trace"] = trace_to_json(r.trace);
    report["cuts"] = cuts_to_json(r.cuts);
  } else {
    rep = solve_method(inst, a.method);
    report["status"] = to_string(rep.status);
    if (!a.no_timing) report["wall_ms"] = rep.wall_ms;
  }
  json sol = solution_to_json(inst, rep.solution);
  sol["manifest"] = mh;
  report["solution"] = sol;
  write_file((fs::path(a.out) / "solution.json").string(), sol.dump(2) + "\n");
  write_file((fs::path(a.out) / "report.json").string(), report.dump(2) + "\n");
  write_manifest(a.out, m);

  const auto violations = check_reformulated(inst, rep.solution);
  std::cout << a.method << ": " << to_string(rep.status) << ", profit "
            << rep.profit * units::kSecondsPerHour << " $/h, hit ratio "
            << hit_ratio(inst, rep.solution) << ", solution " << solution_hash(rep.solution)
            << '\n';
  if (!violations.empty()) {
    std::cerr << "warning: solution violates " << violations.front().message() << '\n';
    return kExitFailure;
  }
  return exit_code(rep.status);
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string instance;
  std::string solution;
  long arrivals = 200000;
  std::uint64_t seed = 1;
  std::string out = ".";
};

int cmd_simulate(const SimulateArgs& a) {
  const Instance inst = read_instance(a.instance);
  if (!fs::exists(a.solution)) throw UsageError("no such file: " + a.solution);
  const Solution sol = solution_from_json(inst, parse_json(read_file(a.solution), a.solution));
  ensure_dir(a.out);
  SimOptions opt;
  opt.arrivals = a.arrivals;
  opt.seed = a.seed;
  const SimReport rep = simulate(inst, sol, opt);
  Manifest m;
  m.command = "simulate";
  m.config_hash = config_hash(json{{"instance", hex64(fnv1a(read_file(a.instance)))},
                                   {"solution", hex64(fnv1a(read_file(a.solution)))},
                                   {"arrivals", a.arrivals}});
  m.seeds = {a.seed};
  m.outputs = {"sim.csv"};
  std::ostringstream os;
  write_sim_csv(os, rep, m.hash());
  write_file((fs::path(a.out) / "sim.csv").string(), os.str());
  write_manifest(a.out, m);
  int late = 0;
  for (const FlowStat& f : rep.flows)
    if (f.sim.mean > f.max_delay + 3.0 * f.sim.stderr_) ++late;
  std::cout << "simulated " << rep.queues.size() << " queues, " << rep.flows.size()
            << " flows; flows above their delay target: " << late << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string preset = "desk";
  std::string bs_list = "2,3,4";
  int services = -1;
  std::string seeds = "1";
  std::string methods = "gbd,nc,ao,rr";
  double alpha = -1.0;
  double epsilon = -1.0;
  int max_iter = -1;
  std::string out = ".";
};

std::vector<int> parse_ints(const std::string& s, const char* what) {
  std::vector<int> v;
  for (const auto& t : split(s, ',')) {
    try {
      std::size_t pos = 0;
      v.push_back(std::stoi(t, &pos));
      if (pos != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw UsageError(std::string("bad ") + what + " list: " + s);
    }
  }
  if (v.empty()) throw UsageError(std::string("empty ") + what + " list");
  return v;
}

int cmd_bench(const BenchArgs& a) {
  const std::vector<int> bs = parse_ints(a.bs_list, "--bs");
  const std::vector<int> seeds = parse_ints(a.seeds, "--seeds");
  const std::vector<std::string> methods = split(a.methods, ',');
  for (const auto& m : methods)
    if (m != "gbd" && m != "nc" && m != "ao" && m != "rr") throw UsageError("unknown method " + m);
  GeneratorConfig base = preset(a.preset);
  if (a.services > 0) base.num_services = a.services;
  if (a.alpha >= 0.0) base.alpha = a.alpha;
  ensure_dir(a.out);

  struct Cell {
    int E;
    int seed;
    std::string method;
    BaselineReport rep;
    double hit = 0.0, delay_ms = 0.0;
    std::string error;
  };
  std::vector<Cell> cells;
  for (int E : bs)
    for (int seed : seeds)
      for (const auto& m : methods) cells.push_back(Cell{E, seed, m, {}, 0.0, 0.0, {}});

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < cells.size();) {
      Cell& c = cells[i];
      try {
        GeneratorConfig cfg = base;
        cfg.num_bs = c.E;
        cfg.seed = static_cast<std::uint64_t>(c.seed);
        Instance inst = generate(cfg);
        if (a.epsilon >= 0.0) inst.params.epsilon = a.epsilon;
        if (a.max_iter > 0) inst.params.max_iterations = a.max_iter;
        c.rep = solve_method(inst, c.method);
        c.hit = hit_ratio(inst, c.rep.solution);
        c.delay_ms = mean_delay(inst, c.rep.solution) * 1e3;
      } catch (const std::exception& ex) {
        c.error = ex.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < worker_count(); ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();

  Manifest m;
  m.command = "bench";
  m.config_hash = config_hash(json{{"preset", a.preset},
                                   {"bs", bs},
                                   {"services", base.num_services},
                                   {"methods", methods},
                                   {"alpha", base.alpha},
                                   {"epsilon", a.epsilon},
                                   {"max_iter", a.max_iter}});
  for (int s : seeds) m.seeds.push_back(static_cast<std::uint64_t>(s));
  m.outputs = {"bench.csv"};
  std::ostringstream os;
  os << "# manifest " << m.hash() << "; profit in $/h\n";
  os << "name,seed,E,S,profit,hit_ratio,mean_delay_ms,wall_ms,status\n";
  os << std::setprecision(12);
  int failures = 0;
  for (const Cell& c : cells) {
    if (!c.error.empty()) {
      std::cerr << "cell " << c.method << " E=" << c.E << " seed=" << c.seed << ": " << c.error
                << '\n';
      ++failures;
      continue;
    }
    os << c.method << ',' << c.seed << ',' << c.E << ',' << base.num_services << ','
       << c.rep.profit * units::kSecondsPerHour << ',' << c.hit << ',' << c.delay_ms << ','
       << c.rep.wall_ms << ',' << to_string(c.rep.status) << '\n';
  }
  write_file((fs::path(a.out) / "bench.csv").string(), os.str());
  write_manifest(a.out, m);
  std::cout << "wrote " << cells.size() - failures << " rows to "
            << (fs::path(a.out) / "bench.csv").string() << '\n';
  return failures ? kExitFailure : kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_report(const std::string& dir) {
  const fs::path csv = fs::path(dir) / "bench.csv";
  if (!fs::exists(csv)) throw UsageError("no bench.csv in " + dir);
  std::istringstream in(read_file(csv.string()));
  struct Acc {
    double profit = 0, hit = 0, delay = 0, wall = 0;
    int n = 0;
  };
  std::map<std::pair<std::string, int>, Acc> acc;
  std::vector<std::string> methods;
  std::vector<int> sizes;
  bool header = false;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() < 8) throw UsageError("malformed bench.csv line: " + line);
    const std::string name = f[0];
    const int E = std::stoi(f[2]);
    Acc& a = acc[{name, E}];
    a.profit += std::stod(f[4]);
    a.hit += std::stod(f[5]);
    a.delay += std::stod(f[6]);
    a.wall += std::stod(f[7]);
    ++a.n;
    if (std::find(methods.begin(), methods.end(), name) == methods.end()) methods.push_back(name);
    if (std::find(sizes.begin(), sizes.end(), E) == sizes.end()) sizes.push_back(E);
  }
  if (acc.empty()) throw UsageError("bench.csv in " + dir + " has no rows");
  std::sort(sizes.begin(), sizes.end());

  auto table = [&](const char* file, auto field) {
    std::ostringstream os;
    os << "# E";
    for (const auto& m : methods) os << ' ' << m;
    os << '\n' << std::setprecision(10);
    for (int E : sizes) {
      os << E;
      for (const auto& m : methods) {
        auto it = acc.find({m, E});
        if (it == acc.end()) os << " nan";
        else os << ' ' << field(it->second) / it->second.n;
      }
      os << '\n';
    }
    write_file((fs::path(dir) / file).string(), os.str());
  };
  table("profit.dat", [](const Acc& a) { return a.profit; });
  table("hit_ratio.dat", [](const Acc& a) { return a.hit; });
  table("delay_ms.dat", [](const Acc& a) { return a.delay; });
  table("runtime_ms.dat", [](const Acc& a) { return a.wall; });

  std::ostringstream gp;
  gp << "set key left top\nset xlabel 'number of BSs'\n";
  const std::pair<const char*, const char*> plots[] = {{"profit.dat", "profit ($/h)"},
                                                        {"hit_ratio.dat", "hit ratio"},
                                                        {"delay_ms.dat", "mean delay (ms)"},
                                                        {"runtime_ms.dat", "runtime (ms)"}};
  for (const auto& [file, label] : plots) {
    gp << "set ylabel '" << label << "'\nset output '" << std::string(file, std::strlen(file) - 4)
       << ".png'\nplot";
    for (std::size_t i = 0; i < methods.size(); ++i)
      gp << (i ? "," : "") << " '" << file << "' using 1:" << i + 2 << " with linespoints title '"
         << methods[i] << "'";
    gp << '\n';
  }
  write_file((fs::path(dir) / "plot.gp").string(), "set terminal png\n" + gp.str());

  std::ostringstream sum;
  sum << std::fixed << std::setprecision(4);
  sum << "method      E   runs   profit($/h)   hit_ratio   delay(ms)   runtime(ms)\n";
  for (const auto& m : methods)
    for (int E : sizes) {
      auto it = acc.find({m, E});
      if (it == acc.end()) continue;
      const Acc& a = it->second;
      sum << std::left << std::setw(10) << m << std::right << std::setw(3) << E << std::setw(7)
          << a.n << std::setw(14) << a.profit / a.n << std::setw(12) << a.hit / a.n
          << std::setw(12) << a.delay / a.n << std::setw(14) << a.wall / a.n << '\n';
    }
  write_file((fs::path(dir) / "summary.txt").string(), sum.str());
  std::cout << sum.str();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative MEC service placement, routing and CPU sizing"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "write a seeded instance");
  g->add_option("--preset", gen.preset, "paper or desk")->check(CLI::IsMember({"paper", "desk"}));
  g->add_option("--config", gen.config, "JSON file with generator overrides");
  g->add_option("--bs", gen.bs, "number of base stations");
  g->add_option("--services", gen.services, "number of services");
  g->add_option("--seed", gen.seed, "random seed");
  g->add_option("--alpha", gen.alpha, "delay split in [0,1]");
  g->add_flag("--full-mesh", gen.full_mesh, "link every pair of base stations");
  g->add_option("--out", gen.out, "output directory");

  SolveArgs sol;
  auto* s = app.add_subcommand("solve", "solve an instance");
  s->add_option("instance", sol.instance, "instance JSON")->required();
  s->add_option("--method", sol.method, "gbd, nc, ao or rr")
      ->check(CLI::IsMember({"gbd", "nc", "ao", "rr"}));
  s->add_option("--alpha", sol.alpha, "delay split in [0,1]");
  s->add_option("--epsilon", sol.epsilon, "absolute tolerance ($/s)");
  s->add_option("--max-iter", sol.max_iter, "iteration limit");
  s->add_option("--seed", sol.seed, "recorded seed");
  s->add_flag("--no-timing", sol.no_timing, "write zero wall times (byte-reproducible outputs)");
  s->add_flag("--node-log", sol.node_log, "write the master branch-and-bound log");
  s->add_option("--out", sol.out, "output directory");

  SimulateArgs sim;
  auto* m = app.add_subcommand("simulate", "simulate the queues of a solution");
  m->add_option("instance", sim.instance, "instance JSON")->required();
  m->add_option("solution", sim.solution, "solution JSON")->required();
  m->add_option("--arrivals", sim.arrivals, "number of generated requests");
  m->add_option("--seed", sim.seed, "random seed");
  m->add_option("--out", sim.out, "output directory");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "sweep sizes, seeds and methods");
  b->add_option("--preset", bench.preset, "paper or desk")->check(CLI::IsMember({"paper", "desk"}));
  b->add_option("--bs", bench.bs_list, "comma-separated base station counts");
  b->add_option("--services", bench.services, "number of services");
  b->add_option("--seeds", bench.seeds, "comma-separated seeds");
  b->add_option("--seed", bench.seeds, "single seed");
  b->add_option("--methods", bench.methods, "comma-separated methods");
  b->add_option("--alpha", bench.alpha, "delay split in [0,1]");
  b->add_option("--epsilon", bench.epsilon, "absolute tolerance ($/s)");
  b->add_option("--max-iter", bench.max_iter, "iteration limit");
  b->add_option("--out", bench.out, "output directory");

  std::string report_dir;
  auto* r = app.add_subcommand("report", "summarize a bench directory");
  r->add_option("dir", report_dir, "bench output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*g) return cmd_generate(gen);
    if (*s) return cmd_solve(sol);
    if (*m) return cmd_simulate(sim);
    if (*b) return cmd_bench(bench);
    if (*r) return cmd_report(report_dir);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
