// Copyright 2026 The gsched Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gsched/cli.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "gsched/baselines.h"
#include "gsched/graph.h"
#include "gsched/optimizer.h"
#include "gsched/oracle.h"
#include "gsched/schedule.h"
#include "gsched/workloads.h"
#include "json.hpp"

namespace gsched {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

class UsageError : public Error {
 public:
  using Error::Error;
};

// Flags shared by every subcommand that works on a problem instance.
struct ProblemFlags {
  std::string graph_path;
  std::string form = "B";
  int depth = 0;  // 0: minimum feasible depth
  int ii = 0;
  int cap = -1;
  double alpha = 0.0;
  uint64_t seed = 0;
  std::string dep_margin = "latency";
  std::string rec_margin = "strict";

  void Register(CLI::App* app, bool require_graph = true) {
    auto* g = app->add_option("-g,--graph", graph_path, "Graph JSON file");
    if (require_graph) g->required();
    app->add_option("--form", form, "Formulation A, B or C")
        ->check(CLI::IsMember({"A", "B", "C", "a", "b", "c"}));
    app->add_option("-D,--depth", depth,
                    "Depth bound D (default: minimum feasible)");
    app->add_option("--ii", ii, "Initiation interval (formulation C)");
    app->add_option("--cap", cap, "Resource cap (required for C)");
    app->add_option("--alpha", alpha, "Communication weight (formulation A)");
    app->add_option("--seed", seed, "Random seed");
    app->add_option("--dep-margin", dep_margin, "latency or chaining")
        ->check(CLI::IsMember({"latency", "chaining"}));
    app->add_option("--rec-margin", rec_margin, "strict or start")
        ->check(CLI::IsMember({"strict", "start"}));
  }

  Formulation formulation() const { return ParseFormulation(form); }

  // Loads the graph, adding a sink for the memory formulations.
  Graph LoadGraph() const {
    Graph graph = ReadGraphFile(graph_path);
    if (formulation() != Formulation::kA) graph = AddSink(graph);
    return graph;
  }

  ProblemSpec MakeSpec(const Graph& graph, int depth_override = 0) const {
    ProblemSpec spec;
    spec.formulation = formulation();
    spec.depth = depth_override > 0 ? depth_override
                 : depth > 0        ? depth
                                    : std::max(1, MinFeasibleDepth(graph));
    spec.alpha = alpha;
    spec.dep_margin =
        dep_margin == "chaining" ? DepMargin::kChaining : DepMargin::kLatency;
    spec.rec_margin =
        rec_margin == "start" ? RecMargin::kStart : RecMargin::kStrict;
    if (cap >= 0) spec.resource_cap = cap;
    if (spec.is_modulo()) {
      if (ii <= 0) throw UsageError("formulation C requires --ii");
      if (cap < 0) throw UsageError("formulation C requires --cap");
      spec.ii = ii;
    }
    spec.Validate(graph);
    return spec;
  }
};

struct OptimizerFlags {
  double time_limit = std::numeric_limits<double>::infinity();
  int max_iters = 5000;
  int legalize_every = 50;
  std::string init = "midpoint";

  void Register(CLI::App* app) {
    app->add_option("--time-limit", time_limit, "Wall-clock budget (seconds)");
    app->add_option("--max-iters", max_iters, "Iteration budget");
    app->add_option("--legalize-every", legalize_every,
                    "Iterations between rounding/legalization checks");
    app->add_option("--init", init, "midpoint or list")
        ->check(CLI::IsMember({"midpoint", "list"}));
  }

  OptimizerConfig MakeConfig(uint64_t seed) const {
    OptimizerConfig cfg;
    cfg.time_limit = time_limit;
    cfg.max_iters = max_iters;
    cfg.legalize_every = legalize_every;
    cfg.init = init == "list" ? InitMode::kListSchedule : InitMode::kMidpoint;
    cfg.seed = seed;
    return cfg;
  }
};

void WriteFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << contents;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string Summary(std::optional<double> objective, bool feasible, int iters,
                    double wall_ms) {
  return "objective=" + (objective ? FormatNumber(*objective) : "inf") +
         " feasible=" + (feasible ? "true" : "false") +
         " iters=" + std::to_string(iters) +
         " wall_ms=" + FormatNumber(std::round(wall_ms * 1000) / 1000);
}

double MillisSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

int CmdSchedule(const ProblemFlags& pf, const OptimizerFlags& of,
                const std::string& out_path, const std::string& trace_path,
                std::ostream& out, std::ostream& err) {
  const Graph graph = pf.LoadGraph();
  const ProblemSpec spec = pf.MakeSpec(graph);
  const OptimizeResult result = Optimize(graph, spec, of.MakeConfig(pf.seed));
  if (!trace_path.empty()) {
    std::ofstream trace(trace_path);
    if (!trace) throw Error("cannot write " + trace_path);
    WriteTraceCsv(trace, result.trace);
  }
  if (!result.feasible()) {
    out << Summary(std::nullopt, false, result.iterations,
                   1e3 * result.wall_time)
        << "\n";
    err << json{{"error", "infeasible under limits"},
                {"report", json::parse(result.last_report.ToJson())}}
               .dump()
        << "\n";
    return kExitFailure;
  }
  if (!out_path.empty()) {
    WriteFile(out_path, SerializeSchedule(*result.best_schedule));
  }
  out << Summary(result.best_objective, true, result.iterations,
                 1e3 * result.wall_time)
      << "\n";
  return kExitOk;
}

int CmdEval(const ProblemFlags& pf, const std::string& schedule_path,
            std::ostream& out) {
  Graph graph = ReadGraphFile(pf.graph_path);
  const Schedule s = ParseSchedule(ReadFile(schedule_path));
  if (!graph.has_explicit_sink() && s.size() == graph.num_nodes() + 1) {
    graph = AddSink(graph);
  }
  if (s.size() != graph.num_nodes()) {
    throw Error("schedule has " + std::to_string(s.size()) +
                " steps but the graph has " +
                std::to_string(graph.num_nodes()) + " nodes");
  }
  const ProblemSpec spec = pf.MakeSpec(graph);
  const FeasibilityReport report = CheckFeasible(graph, s, spec);
  json doc = json::parse(report.ToJson());
  if (report.lat_violations == 0) {
    doc["peak_resource"] = EvalResource(graph, s, spec.depth).peak;
    doc["comm"] = EvalComm(graph, s);
    bool memory_ok = true;
    for (NodeId id = 0; id < graph.num_nodes(); ++id) {
      if (graph.op(id).bits > 0 && graph.succs(id).empty()) memory_ok = false;
    }
    if (memory_ok) doc["peak_memory"] = EvalMemory(graph, s, spec.depth).peak;
    if (pf.ii > 0) {
      doc["peak_mres"] = EvalModuloResource(graph, s, pf.ii).peak;
      if (memory_ok) {
        doc["peak_mmem"] = EvalModuloMemory(graph, s, pf.ii, spec.depth).peak;
      }
    }
    if (memory_ok || !spec.uses_memory()) {
      doc["objective"] = EvalObjective(graph, s, spec);
    }
  }
  out << doc.dump() << "\n";
  return kExitOk;
}

int CmdBaseline(const ProblemFlags& pf, const std::string& method,
                const std::string& out_path, std::ostream& out,
                std::ostream& err) {
  const Graph graph = pf.LoadGraph();
  const ProblemSpec spec = pf.MakeSpec(graph);
  const auto start = std::chrono::steady_clock::now();
  const BaselineRun run = RunBaseline(ParseBaselineMethod(method), graph, spec);
  const double wall_ms = MillisSince(start);
  const bool feasible = run.outcome.ok() && run.report.feasible;
  if (!feasible) {
    out << Summary(std::nullopt, false, 0, wall_ms) << "\n";
    err << json{{"error", run.outcome.failure},
                {"report", json::parse(run.report.ToJson())}}
               .dump()
        << "\n";
    return kExitFailure;
  }
  if (!out_path.empty()) {
    WriteFile(out_path, SerializeSchedule(*run.outcome.schedule));
  }
  out << Summary(run.objective, true, 0, wall_ms) << "\n";
  return kExitOk;
}

int CmdOracle(const ProblemFlags& pf, const OracleLimits& limits,
              std::ostream& out) {
  const Graph graph = pf.LoadGraph();
  const ProblemSpec spec = pf.MakeSpec(graph);
  const OracleResult result = EnumerateOptimal(graph, spec, limits);
  if (!result.feasible()) {
    out << json{{"objective", nullptr}, {"steps", nullptr}}.dump() << "\n";
    return kExitFailure;
  }
  out << json{{"objective", result.objective},
              {"steps", result.schedule->steps}}
             .dump()
      << "\n";
  return kExitOk;
}

struct GenFlags {
  int nodes = 20;
  int depth = 5;
  double density = 0.1;
  uint64_t seed = 0;
  double ratio = kDefaultBackEdgeRatio;
  int max_distance = kDefaultMaxDistance;
  std::string out_path;
};

int CmdGen(const GenFlags& gf, std::ostream& out) {
  Graph graph = GenerateRandomDag(gf.nodes, gf.depth, gf.density, gf.seed);
  graph = AugmentBackEdges(graph, gf.ratio, gf.max_distance, gf.seed + 1);
  const std::string text = SerializeGraph(graph);
  if (gf.out_path.empty()) {
    out << text;
  } else {
    WriteFile(gf.out_path, text);
  }
  return kExitOk;
}

struct BenchFlags {
  std::string instances;
  std::string methods = "gaus,list,fds";
  std::string reference = "list";
  std::string out_dir = "bench_out";
  int depth_slack = 0;
  int workers = 1;
};

struct BenchRow {
  std::string instance;
  std::string method;
  std::optional<double> objective;
  double wall_ms = 0.0;
};

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int CmdBench(const ProblemFlags& pf, const OptimizerFlags& of,
             const BenchFlags& bf, std::ostream& out) {
  std::vector<fs::path> files;
  if (fs::is_directory(bf.instances)) {
    for (const auto& entry : fs::directory_iterator(bf.instances)) {
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error("empty instance set in " + bf.instances);
  const std::vector<std::string> methods = SplitList(bf.methods);
  if (methods.empty()) throw UsageError("no methods given");
  if (std::find(methods.begin(), methods.end(), bf.reference) ==
      methods.end()) {
    throw UsageError("reference method '" + bf.reference +
                     "' is not in the method list");
  }
  for (const std::string& m : methods) {
    if (m != "gaus") ParseBaselineMethod(m);
  }
  fs::create_directories(fs::path(bf.out_dir) / "traces");

  // Validate every instance up front so usage errors surface before any run.
  std::vector<Graph> graphs;
  std::vector<ProblemSpec> specs;
  for (const fs::path& file : files) {
    ProblemFlags instance = pf;
    instance.graph_path = file.string();
    graphs.push_back(instance.LoadGraph());
    const int depth = pf.depth > 0
                          ? pf.depth
                          : MinFeasibleDepth(graphs.back()) + bf.depth_slack;
    specs.push_back(instance.MakeSpec(graphs.back(), depth));
  }

  std::vector<BenchRow> rows(files.size() * methods.size());
  auto run_one = [&](size_t task) {
    const size_t f = task / methods.size();
    const std::string& method = methods[task % methods.size()];
    BenchRow& row = rows[task];
    row.instance = files[f].stem().string();
    row.method = method;
    const auto start = std::chrono::steady_clock::now();
    if (method == "gaus") {
      const OptimizeResult result =
          Optimize(graphs[f], specs[f], of.MakeConfig(pf.seed));
      std::ofstream trace(fs::path(bf.out_dir) / "traces" /
                          (row.instance + ".gaus.csv"));
      WriteTraceCsv(trace, result.trace);
      if (result.feasible()) row.objective = result.best_objective;
    } else {
      const BaselineRun run =
          RunBaseline(ParseBaselineMethod(method), graphs[f], specs[f]);
      if (run.outcome.ok() && run.report.feasible) row.objective = run.objective;
    }
    row.wall_ms = MillisSince(start);
  };

  const size_t tasks = rows.size();
  const int workers = std::max(1, bf.workers);
  if (workers == 1) {
    for (size_t t = 0; t < tasks; ++t) run_one(t);
  } else {
    std::mutex mu;
    size_t next = 0;
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (true) {
          size_t task;
          {
            std::lock_guard<std::mutex> lock(mu);
            if (next >= tasks) return;
            task = next++;
          }
          run_one(task);
        }
      });
    }
  }

  const size_t ref_index =
      std::find(methods.begin(), methods.end(), bf.reference) - methods.begin();
  std::ofstream csv(fs::path(bf.out_dir) / "results.csv");
  csv << "instance,method,objective,feasible,wall_ms,ratio\n";
  std::vector<double> log_sum(methods.size(), 0.0);
  std::vector<int> ratio_count(methods.size(), 0);
  std::vector<int> feasible_count(methods.size(), 0);
  for (size_t t = 0; t < tasks; ++t) {
    const BenchRow& row = rows[t];
    const size_t m = t % methods.size();
    const BenchRow& ref = rows[t - m + ref_index];
    std::optional<double> ratio;
    if (row.objective && ref.objective) {
      if (*ref.objective > 0) {
        ratio = *row.objective / *ref.objective;
      } else if (*row.objective == 0) {
        ratio = 1.0;
      }
    }
    if (row.objective) ++feasible_count[m];
    if (ratio && *ratio > 0) {
      log_sum[m] += std::log(*ratio);
      ++ratio_count[m];
    }
    csv << row.instance << ',' << row.method << ','
        << (row.objective ? FormatNumber(*row.objective) : "inf") << ','
        << (row.objective ? 1 : 0) << ',' << FormatNumber(row.wall_ms) << ','
        << (ratio ? FormatNumber(*ratio) : "inf") << '\n';
  }
  for (size_t m = 0; m < methods.size(); ++m) {
    const double geomean =
        ratio_count[m] > 0 ? std::exp(log_sum[m] / ratio_count[m])
                           : std::numeric_limits<double>::infinity();
    out << "method=" << methods[m] << " geomean_ratio=" << FormatNumber(geomean)
        << " feasible=" << feasible_count[m] << "/" << files.size()
        << " reference=" << bf.reference << "\n";
  }
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Gaussian-relaxation operator scheduler", "gsched"};
  app.require_subcommand(1);

  ProblemFlags pf;
  OptimizerFlags of;
  std::string out_path, trace_path, schedule_path, method = "list";
  OracleLimits limits;
  GenFlags gf;
  BenchFlags bf;

  CLI::App* schedule = app.add_subcommand("schedule", "Run the optimizer");
  pf.Register(schedule);
  of.Register(schedule);
  schedule->add_option("--out", out_path, "Schedule JSON output");
  schedule->add_option("--trace", trace_path, "Trace CSV output");

  CLI::App* eval = app.add_subcommand("eval", "Evaluate a schedule");
  pf.Register(eval);
  eval->add_option("-s,--schedule", schedule_path, "Schedule JSON")->required();

  CLI::App* baseline = app.add_subcommand("baseline", "Run a heuristic");
  pf.Register(baseline);
  baseline->add_option("--method", method, "asap, alap, list or fds")
      ->check(CLI::IsMember({"asap", "alap", "list", "fds"}));
  baseline->add_option("--out", out_path, "Schedule JSON output");

  CLI::App* oracle = app.add_subcommand("oracle", "Exhaustive optimum");
  pf.Register(oracle);
  oracle->add_option("--max-nodes", limits.max_nodes);
  oracle->add_option("--max-depth", limits.max_depth);

  CLI::App* gen = app.add_subcommand("gen", "Generate a random workload");
  gen->add_option("-n,--nodes", gf.nodes, "Number of operators");
  gen->add_option("--depth", gf.depth, "Number of layers");
  gen->add_option("--density", gf.density, "Edge probability");
  gen->add_option("--seed", gf.seed, "Random seed");
  gen->add_option("--backedge-ratio", gf.ratio, "Back-edges per node");
  gen->add_option("--max-distance", gf.max_distance, "Max back-edge distance");
  gen->add_option("--out", gf.out_path, "Output file (default stdout)");

  CLI::App* bench = app.add_subcommand("bench", "Batch comparison");
  pf.Register(bench, /*require_graph=*/false);
  of.Register(bench);
  bench->add_option("--instances", bf.instances, "Directory of graph JSON")
      ->required();
  bench->add_option("--methods", bf.methods, "Comma list: gaus,list,fds,...");
  bench->add_option("--method", bf.methods, "Alias of --methods");
  bench->add_option("--reference", bf.reference, "Reference method");
  bench->add_option("--out", bf.out_dir, "Output directory");
  bench->add_option("--depth-slack", bf.depth_slack,
                    "D = minimum feasible depth + slack when -D is not set");
  bench->add_option("--workers", bf.workers, "Concurrent runs");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*schedule) {
      return CmdSchedule(pf, of, out_path, trace_path, out, err);
    }
    if (*eval) return CmdEval(pf, schedule_path, out);
    if (*baseline) return CmdBaseline(pf, method, out_path, out, err);
    if (*oracle) return CmdOracle(pf, limits, out);
    if (*gen) return CmdGen(gf, out);
    if (*bench) return CmdBench(pf, of, bf, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << json{{"error", e.what()}}.dump() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace gsched
