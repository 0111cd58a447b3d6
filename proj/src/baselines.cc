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

#include "gsched/baselines.h"

#include <algorithm>
#include <limits>

#include "gsched/legalize.h"

namespace gsched {

Schedule AsapSchedule(const Graph& graph, int depth) {
  return Schedule{ComputeBounds(graph, depth).asap};
}

Schedule AlapSchedule(const Graph& graph, int depth) {
  return Schedule{ComputeBounds(graph, depth).alap};
}

ScheduleOutcome ListSchedule(const Graph& graph, const ProblemSpec& spec) {
  const int n = graph.num_nodes();
  const int depth = spec.depth;
  ComputeBounds(graph, depth);  // throws on an infeasible depth

  std::vector<int> priority = LongestPathToSinks(graph);
  for (NodeId id = 0; id < n; ++id) priority[id] += graph.op(id).latency;

  const bool capped = spec.resource_cap.has_value() &&
                      spec.formulation != Formulation::kB;
  const int slots = spec.is_modulo() ? spec.ii : depth;
  std::vector<int> usage(slots, 0);

  std::vector<int> steps(n, -1);
  std::vector<int> pending(n);
  std::vector<int> earliest(n, 0);
  for (NodeId id = 0; id < n; ++id) {
    pending[id] = static_cast<int>(graph.preds(id).size());
  }
  int placed = 0;
  std::vector<NodeId> ready;
  for (int t = 0; t < depth && placed < n; ++t) {
    ready.clear();
    for (NodeId id = 0; id < n; ++id) {
      if (steps[id] < 0 && pending[id] == 0 && earliest[id] <= t) {
        ready.push_back(id);
      }
    }
    std::sort(ready.begin(), ready.end(), [&](NodeId a, NodeId b) {
      return priority[a] != priority[b] ? priority[a] > priority[b] : a < b;
    });
    int& used = usage[spec.is_modulo() ? t % spec.ii : t];
    for (NodeId id : ready) {
      const int r = graph.op(id).resource;
      if (capped && used + r > *spec.resource_cap) continue;
      used += r;
      steps[id] = t;
      ++placed;
      for (NodeId s : graph.succs(id)) {
        --pending[s];
        earliest[s] = std::max(earliest[s], t + graph.op(id).latency);
      }
    }
  }
  if (placed < n) {
    return {std::nullopt, "resource cap too tight for depth " +
                              std::to_string(depth) + " (" +
                              std::to_string(n - placed) +
                              " operators unplaced)"};
  }
  return {Schedule{std::move(steps)}, ""};
}

Schedule ForceDirectedSchedule(const Graph& graph, int depth,
                               FdsWeight weight) {
  const int n = graph.num_nodes();
  const DepthBounds bounds = ComputeBounds(graph, depth);
  std::vector<int> lo = bounds.asap;
  std::vector<int> hi = bounds.alap;
  std::vector<double> w(n);
  for (NodeId id = 0; id < n; ++id) {
    w[id] = weight == FdsWeight::kResource ? graph.op(id).resource
                                           : graph.op(id).bits;
  }

  std::vector<double> dg(depth), prefix(depth + 1);
  auto average = [&prefix](int a, int b) {
    return (prefix[b + 1] - prefix[a]) / (b - a + 1);
  };
  const auto& order = graph.topo_order();

  while (true) {
    std::fill(dg.begin(), dg.end(), 0.0);
    bool any_free = false;
    for (NodeId id = 0; id < n; ++id) {
      if (lo[id] < hi[id]) any_free = true;
      const double share = w[id] / (hi[id] - lo[id] + 1);
      for (int d = lo[id]; d <= hi[id]; ++d) dg[d] += share;
    }
    if (!any_free) break;
    for (int d = 0; d < depth; ++d) prefix[d + 1] = prefix[d] + dg[d];

    double best_force = std::numeric_limits<double>::infinity();
    NodeId best_node = -1;
    int best_step = -1;
    for (NodeId id = 0; id < n; ++id) {
      if (lo[id] == hi[id]) continue;
      const double base = average(lo[id], hi[id]);
      for (int t = lo[id]; t <= hi[id]; ++t) {
        double force = w[id] * (dg[t] - base);
        for (NodeId p : graph.preds(id)) {
          const int new_hi = std::min(hi[p], t - graph.op(p).latency);
          if (new_hi < hi[p]) {
            force += w[p] * (average(lo[p], new_hi) - average(lo[p], hi[p]));
          }
        }
        for (NodeId c : graph.succs(id)) {
          const int new_lo = std::max(lo[c], t + graph.op(id).latency);
          if (new_lo > lo[c]) {
            force += w[c] * (average(new_lo, hi[c]) - average(lo[c], hi[c]));
          }
        }
        if (force < best_force - 1e-12) {
          best_force = force;
          best_node = id;
          best_step = t;
        }
      }
    }

    lo[best_node] = hi[best_node] = best_step;
    for (NodeId id : order) {
      for (NodeId p : graph.preds(id)) {
        lo[id] = std::max(lo[id], lo[p] + graph.op(p).latency);
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      for (NodeId s : graph.succs(*it)) {
        hi[*it] = std::min(hi[*it], hi[s] - graph.op(*it).latency);
      }
    }
  }
  return Schedule{std::move(lo)};
}

BaselineMethod ParseBaselineMethod(std::string_view text) {
  if (text == "asap") return BaselineMethod::kAsap;
  if (text == "alap") return BaselineMethod::kAlap;
  if (text == "list") return BaselineMethod::kList;
  if (text == "fds") return BaselineMethod::kFds;
  throw Error("unknown baseline method '" + std::string(text) + "'");
}

std::string_view BaselineMethodName(BaselineMethod m) {
  switch (m) {
    case BaselineMethod::kAsap:
      return "asap";
    case BaselineMethod::kAlap:
      return "alap";
    case BaselineMethod::kList:
      return "list";
    case BaselineMethod::kFds:
      return "fds";
  }
  return "?";
}

BaselineRun RunBaseline(BaselineMethod method, const Graph& graph,
                        const ProblemSpec& spec) {
  spec.Validate(graph);
  BaselineRun run;
  switch (method) {
    case BaselineMethod::kAsap:
      run.outcome.schedule = AsapSchedule(graph, spec.depth);
      break;
    case BaselineMethod::kAlap:
      run.outcome.schedule = AlapSchedule(graph, spec.depth);
      break;
    case BaselineMethod::kList:
      run.outcome = ListSchedule(graph, spec);
      break;
    case BaselineMethod::kFds:
      run.outcome.schedule = ForceDirectedSchedule(
          graph, spec.depth,
          spec.formulation == Formulation::kA ? FdsWeight::kResource
                                              : FdsWeight::kMemory);
      break;
  }
  if (!run.outcome.ok()) {
    run.report.feasible = false;
    return run;
  }
  if (spec.is_modulo()) {
    ModuloLegalization legal =
        LegalizeModulo(graph, *run.outcome.schedule, spec.depth, spec.ii);
    if (!legal.ok()) {
      run.report = legal.report;
      run.outcome.failure = "modulo legalization failed: " + legal.failure;
      run.outcome.schedule.reset();
      return run;
    }
    run.outcome.schedule = std::move(legal.schedule);
  }
  run.report = CheckFeasible(graph, *run.outcome.schedule, spec);
  if (run.report.feasible) {
    run.objective = EvalObjective(graph, *run.outcome.schedule, spec);
  } else {
    run.outcome.failure = "schedule violates constraints: " + run.report.ToJson();
  }
  return run;
}

}  // namespace gsched
