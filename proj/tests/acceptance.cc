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


// Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gsched/baselines.h"
#include "gsched/graph.h"
#include "gsched/legalize.h"
#include "gsched/optimizer.h"
#include "gsched/oracle.h"
#include "gsched/relax.h"
#include "gsched/schedule.h"
#include "gsched/workloads.h"
#include "test_util.h"

namespace gsched {
namespace {

using Clock = std::chrono::steady_clock;
using testing::RandomParams;
using testing::RelativeError;
using testing::SmallRandomGraph;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Fmt(const char* format, double a, double b = 0, double c = 0,
                double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c, d);
  return buf;
}

bool g_verbose = false;

// Traces gathered by the optimizer-based criteria, checked by criterion 10.
std::vector<std::vector<TracePoint>> g_traces;

bool BestMonotone(const std::vector<TracePoint>& trace) {
  std::optional<double> prev;
  for (const TracePoint& p : trace) {
    if (prev && (!p.best_obj || *p.best_obj > *prev)) return false;
    if (p.best_obj) prev = p.best_obj;
  }
  return true;
}

Outcome Normalization() {
  const auto start = Clock::now();
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> depth_dist(1, 16);
  std::uniform_real_distribution<double> sigma_dist(0.01, 8.0);
  double worst = 0.0;
  bool monotone = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const int depth = depth_dist(rng);
    std::uniform_real_distribution<double> mu_dist(-3.0, depth + 3.0);
    const GaussianParams p({mu_dist(rng)}, {sigma_dist(rng)});
    const StepDistribution dist(p, depth);
    double sum = 0.0;
    double prev_cdf = 0.0;
    for (int d = 0; d < depth; ++d) {
      sum += StepProb(p, 0, d, depth);
      const double cdf = StepCdf(p, 0, d, depth);
      if (cdf < prev_cdf || dist.Cdf(0, d) < dist.Cdf(0, d - 1)) {
        monotone = false;
      }
      prev_cdf = cdf;
    }
    double table_sum = 0.0;
    for (int d = 0; d < depth; ++d) table_sum += dist.Prob(0, d);
    worst = std::max({worst, std::abs(sum - 1.0), std::abs(table_sum - 1.0)});
  }
  const double elapsed = Seconds(start);
  Outcome out;
  out.pass = worst <= 1e-9 && monotone && elapsed < 1.0;
  out.detail = Fmt("max |sum-1|=%.3g monotone=%g time=%.3fs", worst, monotone,
                   elapsed);
  return out;
}

Outcome GradientCorrectness() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2);
  const int depth = 8;
  double worst = 0.0, worst_abs = 0.0;
  std::string worst_term;
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Graph base = SmallRandomGraph(rng, 10, 0.3, 2);
    ProblemSpec spec;
    spec.depth = depth;
    spec.formulation = static_cast<Formulation>(trial % 3);
    spec.alpha = 0.5;
    Graph graph = spec.uses_memory() ? AddSink(base) : base;
    if (spec.is_modulo()) {
      spec.ii = 3;
      spec.resource_cap = std::max(1, graph.max_resource());
    }
    const GaussianParams p = RandomParams(rng, graph.num_nodes(), depth);
    const RelaxConfig cfg;
    const std::vector<LossTerm> terms = EvaluateTerms(graph, p, spec, cfg);
    for (size_t t = 0; t < terms.size(); ++t) {
      const std::vector<double> fd =
          testing::FiniteDifference(p, [&](const GaussianParams& q) {
            return EvaluateTerms(graph, q, spec, cfg, false)[t].value;
          });
      for (size_t k = 0; k < fd.size(); ++k) {
        const double err = RelativeError(terms[t].gradient[k], fd[k]);
        worst_abs = std::max(worst_abs, std::abs(terms[t].gradient[k] - fd[k]));
        ++checked;
        if (err > worst) {
          worst = err;
          worst_term = std::string(terms[t].name);
        }
      }
    }
  }
  const double elapsed = Seconds(start);
  Outcome out;
  out.pass = worst < 1e-4 && elapsed < 30.0;
  out.detail = Fmt("%g partials, max rel err=%.3g, max abs diff=%.3g",
                   checked, worst, worst_abs) +
               " (" +
               (worst_term.empty() ? "-" : worst_term) + ")" +
               Fmt(" time=%.2fs", elapsed);
  return out;
}

Outcome FormulaEquivalence() {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> n_dist(2, 10);
  std::uniform_int_distribution<int> depth_dist(1, 8);
  std::uniform_int_distribution<int> ii_dist(1, 4);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Graph g = SmallRandomGraph(rng, n_dist(rng), 0.4, 3);
    const int depth = depth_dist(rng);
    const int ii = ii_dist(rng);
    const GaussianParams p = RandomParams(rng, g.num_nodes(), depth);
    const StepDistribution dist(p, depth);
    for (DepMargin m : {DepMargin::kChaining, DepMargin::kLatency}) {
      worst = std::max(worst, std::abs(ExpectedDepViolation(g, dist, m) -
                                       testing::NaiveDep(g, p, depth, m)));
    }
    worst = std::max(worst, std::abs(ExpectedComm(g, dist) -
                                     testing::NaiveComm(g, p, depth)));
    for (RecMargin m : {RecMargin::kStrict, RecMargin::kStart}) {
      worst = std::max(
          worst, std::abs(ExpectedRecViolation(g, dist, ii, m) -
                          testing::NaiveRec(g, p, depth, ii, m)));
    }
  }
  Outcome out;
  out.pass = worst <= 1e-9;
  out.detail = Fmt("max |efficient - literal|=%.3g", worst);
  return out;
}

Outcome DegenerateLimit() {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> n_dist(2, 10);
  std::uniform_int_distribution<int> depth_dist(2, 8);
  std::uniform_int_distribution<int> ii_dist(1, 4);
  double worst = 0.0;
  auto track = [&](std::span<const double> relaxed,
                   const std::vector<int>& discrete) {
    for (size_t d = 0; d < relaxed.size(); ++d) {
      worst = std::max(worst, std::abs(relaxed[d] - discrete[d]));
    }
  };
  for (int trial = 0; trial < 50; ++trial) {
    const Graph g = AddSink(SmallRandomGraph(rng, n_dist(rng), 0.4, 2));
    const int depth = depth_dist(rng);
    const int ii = ii_dist(rng);
    std::uniform_int_distribution<int> step(0, depth - 1);
    Schedule s{std::vector<int>(g.num_nodes())};
    for (int& t : s.steps) t = step(rng);
    std::vector<double> mu(s.steps.begin(), s.steps.end());
    const GaussianParams p(mu, std::vector<double>(g.num_nodes(),
                                                   kDefaultSigmaMin));
    const StepDistribution dist(p, depth);

    track(ExpectedResourceProfile(g, dist), EvalResource(g, s, depth).values);
    track(ExpectedMemoryProfile(g, dist), EvalMemory(g, s, depth).values);
    track(ExpectedModuloResourceProfile(g, dist, ii),
          EvalModuloResource(g, s, ii).values);
    track(ExpectedModuloMemoryProfile(g, dist, ii),
          EvalModuloMemory(g, s, ii, depth).values);
    // The relaxed length only counts forward-pointing edges; on schedules
    // where every edge points forward it is the discrete total length.
    int forward_length = 0;
    for (const Edge& e : g.edges()) {
      forward_length += std::max(0, s[e.consumer] - s[e.producer]);
    }
    worst = std::max(worst, std::abs(ExpectedComm(g, dist) - forward_length));
    ProblemSpec chaining;
    chaining.depth = depth;
    chaining.dep_margin = DepMargin::kChaining;
    if (CheckPrecedence(g, s, chaining).feasible) {
      worst =
          std::max(worst, std::abs(ExpectedComm(g, dist) - EvalComm(g, s)));
    }

    ProblemSpec spec;
    spec.formulation = Formulation::kC;
    spec.depth = depth;
    spec.ii = ii;
    for (DepMargin m : {DepMargin::kChaining, DepMargin::kLatency}) {
      spec.dep_margin = m;
      const FeasibilityReport r = CheckPrecedence(g, s, spec);
      worst = std::max(worst, std::abs(ExpectedDepViolation(g, dist, m) -
                                       r.dep_violations));
    }
    spec.dep_margin = DepMargin::kLatency;
    const FeasibilityReport r = CheckPrecedence(g, s, spec);
    worst = std::max(worst,
                     std::abs(ExpectedRecViolation(g, dist, ii,
                                                   RecMargin::kStrict) -
                              r.rec_violations));
  }
  Outcome out;
  out.pass = worst <= 1e-4;
  out.detail = Fmt("max |expected - discrete|=%.3g", worst);
  return out;
}

Outcome SmoothMaxBounds() {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> len(1, 64);
  std::uniform_real_distribution<double> value(-50.0, 50.0);
  std::uniform_real_distribution<double> log_tau(-4.0, 1.0);
  int failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> profile(len(rng));
    for (double& v : profile) v = value(rng);
    // Some profiles with ties at the maximum.
    if (trial % 4 == 0) profile.assign(profile.size(), profile[0]);
    const double tau = std::pow(10.0, log_tau(rng));
    const double max = *std::max_element(profile.begin(), profile.end());
    const double sm = SmoothMax(profile, tau);
    const double upper = max + tau * std::log(static_cast<double>(
                                         profile.size()));
    if (!(max <= sm && sm <= upper)) ++failures;
  }
  Outcome out;
  out.pass = failures == 0;
  out.detail = Fmt("%g of 1000 profiles out of bounds", failures);
  return out;
}

Outcome LegalizationSoundness() {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> n_dist(2, 50);
  std::uniform_int_distribution<int> slack_dist(0, 4);
  int regular_bad = 0, modulo_bad = 0, modulo_ok = 0, modulo_failed = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = n_dist(rng);
    std::uniform_int_distribution<int> back_dist(0, std::max(1, n / 10));
    const Graph g = SmallRandomGraph(rng, n, 4.0 / n, back_dist(rng));
    const int depth = MinFeasibleDepth(g) + slack_dist(rng);
    std::uniform_int_distribution<int> ii_dist(std::max(1, depth / 2), depth);
    const int ii = ii_dist(rng);
    // A rounding of random Gaussian parameters, as the optimizer would see.
    std::uniform_real_distribution<double> mu(-1.0, depth);
    GaussianParams p;
    for (int i = 0; i < n; ++i) p.mu.push_back(mu(rng));
    p.log_sigma.assign(n, 0.0);
    const Schedule s = RoundSchedule(p, depth);

    ProblemSpec spec;
    spec.depth = depth;
    spec.formulation = Formulation::kB;
    const Schedule reg = LegalizeRegular(g, s, depth);
    if (!CheckPrecedence(g, reg, spec).feasible ||
        LegalizeRegular(g, reg, depth) != reg) {
      ++regular_bad;
    }

    spec.formulation = Formulation::kC;
    spec.ii = ii;
    // Raw roundings, and roundings already pushed by the regular pass (the
    // order the optimizer uses). Most raw roundings overflow the depth.
    for (const Schedule* input : {&s, &reg}) {
      const ModuloLegalization mod = LegalizeModulo(g, *input, depth, ii);
      if (!mod.ok()) {
        ++modulo_failed;
        continue;
      }
      ++modulo_ok;
      const ModuloLegalization again =
          LegalizeModulo(g, mod.schedule, depth, ii);
      if (!CheckPrecedence(g, mod.schedule, spec).feasible || !again.ok() ||
          again.schedule != mod.schedule) {
        ++modulo_bad;
      }
    }
  }
  Outcome out;
  out.pass = regular_bad == 0 && modulo_bad == 0 && modulo_ok > 0;
  out.detail = Fmt("regular bad=%g/1000; modulo bad=%g of %g legalized "
                   "(%g reported failures over 2000 inputs)",
                   regular_bad, modulo_bad, modulo_ok, modulo_failed);
  return out;
}

struct SmallInstance {
  Graph graph;
  ProblemSpec spec;
  OracleResult oracle;
};

// Draws random instances until one has a feasible oracle optimum.
SmallInstance DrawSmallInstance(Formulation form, uint64_t& seed) {
  while (true) {
    std::mt19937_64 rng(seed++);
    const bool memory = form != Formulation::kA;
    std::uniform_int_distribution<int> n_dist(3, memory ? 6 : 7);
    const int n = n_dist(rng);
    std::uniform_int_distribution<int> layers_dist(2, std::min(n, 4));
    const int layers = layers_dist(rng);
    Graph g = GenerateRandomDag(n, layers, 0.3, rng());
    SmallInstance inst;
    inst.spec.formulation = form;
    if (form == Formulation::kA) {
      inst.spec.alpha = std::bernoulli_distribution(0.5)(rng) ? 0.5 : 0.0;
    }
    if (form == Formulation::kC) {
      std::uniform_int_distribution<int> k_dist(1, 2);
      try {
        g = AugmentBackEdges(g, static_cast<double>(k_dist(rng)) / n,
                             kDefaultMaxDistance, rng());
      } catch (const Error&) {
        continue;  // too few ancestor/descendant pairs
      }
    }
    if (memory) g = AddSink(g);
    std::uniform_int_distribution<int> slack_dist(0, 2);
    inst.spec.depth = std::min(6, MinFeasibleDepth(g) + slack_dist(rng));
    if (inst.spec.depth < MinFeasibleDepth(g)) continue;
    if (form == Formulation::kC) {
      inst.spec.ii = std::uniform_int_distribution<int>(2, 3)(rng);
      if (inst.spec.ii > inst.spec.depth) continue;
      int total = 0;
      for (const Operator& o : g.operators()) total += o.resource;
      inst.spec.resource_cap =
          std::max(g.max_resource(),
                   (total + inst.spec.ii - 1) / inst.spec.ii);
    }
    inst.graph = std::move(g);
    inst.oracle = EnumerateOptimal(inst.graph, inst.spec);
    if (inst.oracle.feasible()) return inst;
  }
}

OptimizerConfig SmallConfig() {
  OptimizerConfig cfg;
  cfg.max_iters = 5000;
  cfg.time_limit = 10.0;
  return cfg;
}

Outcome OracleGap() {
  const auto start = Clock::now();
  Outcome out;
  std::ostringstream detail;
  uint64_t seed = 7000;
  for (Formulation form :
       {Formulation::kA, Formulation::kB, Formulation::kC}) {
    int exact = 0, within = 0;
    double worst_ratio = 1.0;
    for (int k = 0; k < 50; ++k) {
      const SmallInstance inst = DrawSmallInstance(form, seed);
      const OptimizeResult r =
          Optimize(inst.graph, inst.spec, SmallConfig());
      g_traces.push_back(r.trace);
      if (!r.feasible()) {
        worst_ratio = std::numeric_limits<double>::infinity();
        continue;
      }
      const double opt = inst.oracle.objective;
      const double got = r.best_objective;
      if (g_verbose) {
        std::printf("  %s #%d |V|=%d D=%d II=%d oracle=%g got=%g iters=%d%s\n",
                    std::string(FormulationName(form)).c_str(), k,
                    inst.graph.num_nodes(), inst.spec.depth, inst.spec.ii, opt,
                    got, r.iterations, r.converged ? " converged" : "");
      }
      if (std::abs(got - opt) <= 1e-9) ++exact;
      if (got <= 1.25 * opt + 1e-9) ++within;
      worst_ratio = std::max(worst_ratio, opt > 0 ? got / opt
                                          : got > 0
                                              ? std::numeric_limits<
                                                    double>::infinity()
                                              : 1.0);
    }
    const bool pass = exact >= 35 && within == 50;
    out.pass = out.pass && pass;
    detail << FormulationName(form) << ": exact " << exact << "/50, within "
           << "1.25x " << within << "/50, worst ratio " << worst_ratio
           << "; ";
  }
  const double elapsed = Seconds(start);
  out.pass = out.pass && elapsed < 600.0;
  detail << "time=" << elapsed << "s";
  out.detail = detail.str();
  return out;
}

Outcome HeuristicCompetitiveness() {
  const auto start = Clock::now();
  int wins = 0;
  std::ostringstream detail;
  for (int k = 0; k < 20; ++k) {
    const Graph g = AddSink(GenerateRandomDag(200, 12, 0.02, 800 + k));
    ProblemSpec spec;
    spec.formulation = Formulation::kB;
    spec.depth = MinFeasibleDepth(g) + 2;
    const OptimizeResult gaus = Optimize(g, spec, OptimizerConfig{});
    g_traces.push_back(gaus.trace);
    const BaselineRun list = RunBaseline(BaselineMethod::kList, g, spec);
    const BaselineRun fds = RunBaseline(BaselineMethod::kFds, g, spec);
    const double inf = std::numeric_limits<double>::infinity();
    const double a = gaus.feasible() ? gaus.best_objective : inf;
    const double b = list.report.feasible ? list.objective : inf;
    const double c = fds.report.feasible ? fds.objective : inf;
    if (a <= b && a <= c) ++wins;
    detail << a << "/" << b << "/" << c << " ";
  }
  const double elapsed = Seconds(start);
  Outcome out;
  out.pass = wins >= 12 && elapsed < 900.0;
  out.detail = Fmt("optimizer <= list and FDS on %g/20 (peak gaus/list/fds: ",
                   wins) +
               detail.str() + Fmt(") time=%.1fs", elapsed);
  return out;
}

Outcome ParameterCount() {
  std::mt19937_64 rng(9);
  bool ok = true;
  for (int n : {1, 5, 40}) {
    const Graph g = AddSink(SmallRandomGraph(rng, n, 0.3));
    ProblemSpec spec;
    spec.depth = MinFeasibleDepth(g) + 3;
    OptimizerConfig cfg;
    cfg.max_iters = 10;
    const GaussianParams p = InitParams(g, spec, cfg);
    const OptimizeResult r = Optimize(g, spec, cfg);
    const int expected = 2 * g.num_nodes();
    ok = ok && p.num_trainable() == expected &&
         static_cast<int>(p.mu.size() + p.log_sigma.size()) == expected &&
         r.num_trainable == expected &&
         AdamState(p.num_trainable()).size() == expected;
  }
  Outcome out;
  out.pass = ok;
  out.detail = ok ? "trainable state == 2|V| for |V| in {2, 6, 41}"
                  : "trainable state size mismatch";
  return out;
}

bool SameTrace(const std::vector<TracePoint>& a,
               const std::vector<TracePoint>& b) {
  if (a.size() != b.size()) return false;
  for (size_t k = 0; k < a.size(); ++k) {
    const TracePoint& x = a[k];
    const TracePoint& y = b[k];
    if (x.iter != y.iter || x.total_loss != y.total_loss ||
        x.loss_obj != y.loss_obj || x.v_dep != y.v_dep ||
        x.v_rec != y.v_rec || x.v_res != y.v_res ||
        x.rounded_obj != y.rounded_obj || x.feasible != y.feasible ||
        x.best_obj != y.best_obj) {
      return false;
    }
  }
  return true;
}

Outcome DeterminismAndMonotonicity() {
  int identical = 0, runs = 0;
  uint64_t seed = 9100;
  for (Formulation form :
       {Formulation::kA, Formulation::kB, Formulation::kC}) {
    for (int k = 0; k < 3; ++k) {
      const SmallInstance inst = DrawSmallInstance(form, seed);
      OptimizerConfig cfg;
      cfg.max_iters = 2000;
      cfg.seed = 11;
      const OptimizeResult a = Optimize(inst.graph, inst.spec, cfg);
      const OptimizeResult b = Optimize(inst.graph, inst.spec, cfg);
      ++runs;
      if (SameTrace(a.trace, b.trace) && a.best_schedule == b.best_schedule) {
        ++identical;
      }
    }
  }
  {
    const Graph g = AddSink(GenerateRandomDag(200, 12, 0.02, 800));
    ProblemSpec spec;
    spec.depth = MinFeasibleDepth(g) + 2;
    OptimizerConfig cfg;
    cfg.max_iters = 500;
    const OptimizeResult a = Optimize(g, spec, cfg);
    const OptimizeResult b = Optimize(g, spec, cfg);
    ++runs;
    if (SameTrace(a.trace, b.trace)) ++identical;
  }
  int monotone = 0;
  for (const auto& trace : g_traces) monotone += BestMonotone(trace);
  const int traced = static_cast<int>(g_traces.size());
  Outcome out;
  out.pass = identical == runs && monotone == traced && traced > 0;
  out.detail = Fmt("identical traces %g/%g; monotone best %g/%g", identical,
                   runs, monotone, traced);
  return out;
}

}  // namespace
}  // namespace gsched

// Usage: acceptance [-v] [criterion numbers...]
int main(int argc, char** argv) {
  using gsched::Outcome;
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"normalization", gsched::Normalization},
      {"gradient correctness", gsched::GradientCorrectness},
      {"formula equivalence", gsched::FormulaEquivalence},
      {"degenerate limit", gsched::DegenerateLimit},
      {"smooth max bounds", gsched::SmoothMaxBounds},
      {"legalization soundness", gsched::LegalizationSoundness},
      {"oracle optimality gap", gsched::OracleGap},
      {"heuristic competitiveness", gsched::HeuristicCompetitiveness},
      {"parameter count", gsched::ParameterCount},
      {"determinism and trace monotonicity",
       gsched::DeterminismAndMonotonicity},
  };
  std::vector<bool> selected(criteria.size(), argc <= 1);
  for (int a = 1; a < argc; ++a) {
    const std::string arg = argv[a];
    if (arg == "-v") {
      gsched::g_verbose = true;
      if (argc == 2) selected.assign(criteria.size(), true);
      continue;
    }
    const size_t k = std::stoul(arg);
    if (k >= 1 && k <= criteria.size()) selected[k - 1] = true;
  }
  int failed = 0, ran = 0;
  for (size_t k = 0; k < criteria.size(); ++k) {
    if (!selected[k]) continue;
    ++ran;
    Outcome outcome;
    try {
      outcome = criteria[k].run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failed;
    std::printf("[%s] criterion %zu (%s): %s\n",
                outcome.pass ? "PASS" : "FAIL", k + 1, criteria[k].name,
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
