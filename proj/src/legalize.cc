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

#include "gsched/legalize.h"

#include <algorithm>
#include <set>
#include <string>
#include <vector>

namespace gsched {

namespace {

void CheckSize(const Graph& graph, const Schedule& s) {
  if (s.size() != graph.num_nodes()) {
    throw Error("schedule has " + std::to_string(s.size()) +
                " steps but the graph has " +
                std::to_string(graph.num_nodes()) + " nodes");
  }
}

int EarliestFromPreds(const Graph& graph, const std::vector<int>& steps,
                      NodeId id) {
  int t = 0;
  for (NodeId p : graph.preds(id)) {
    t = std::max(t, steps[p] + graph.op(p).latency);
  }
  return t;
}

}  // namespace

Schedule LegalizeRegular(const Graph& graph, const Schedule& s, int depth) {
  CheckSize(graph, s);
  const DepthBounds bounds = ComputeBounds(graph, depth);
  std::vector<int> steps = s.steps;
  for (NodeId id = 0; id < graph.num_nodes(); ++id) {
    steps[id] = std::clamp(steps[id], bounds.asap[id], bounds.alap[id]);
  }
  for (NodeId id : graph.topo_order()) {
    steps[id] = std::max(steps[id], EarliestFromPreds(graph, steps, id));
  }
  return Schedule{std::move(steps)};
}

ModuloLegalization LegalizeModulo(const Graph& graph, const Schedule& s,
                                  int depth, int ii) {
  CheckSize(graph, s);
  if (ii < 1) throw Error("initiation interval must be >= 1");

  // Back-edges grouped by consumer.
  std::vector<std::vector<const BackEdge*>> deadlines(graph.num_nodes());
  for (const BackEdge& be : graph.back_edges()) {
    deadlines[be.consumer].push_back(&be);
  }

  ModuloLegalization result;
  std::vector<int> steps = s.steps;
  const int max_passes = std::max(1, graph.num_nodes());
  for (int pass = 0; pass < max_passes; ++pass) {
    ++result.passes;
    bool changed = false;
    for (NodeId id : graph.topo_order()) {
      int required = EarliestFromPreds(graph, steps, id);
      for (const BackEdge* be : deadlines[id]) {
        required = std::max(required, steps[be->producer] -
                                          be->distance * ii +
                                          graph.op(be->producer).latency);
      }
      if (required > steps[id]) {
        steps[id] = required;
        changed = true;
      }
    }
    if (!changed) {
      result.converged = true;
      break;
    }
  }

  result.schedule = Schedule{std::move(steps)};
  ProblemSpec check;
  check.formulation = Formulation::kC;
  check.depth = depth;
  check.ii = ii;
  result.report = CheckPrecedence(graph, result.schedule, check);
  if (!result.report.feasible) {
    result.failure = result.report.lat_violations > 0
                         ? "depth overflow"
                         : "potential recurrence violation";
    if (!result.converged) result.failure += " (no fixed point)";
  }
  return result;
}

namespace {

std::vector<int> SlotUsage(const Graph& graph, const std::vector<int>& steps,
                           int ii) {
  std::vector<int> usage(ii, 0);
  for (NodeId id = 0; id < graph.num_nodes(); ++id) {
    usage[steps[id] % ii] += graph.op(id).resource;
  }
  return usage;
}

int Excess(const std::vector<int>& usage, int cap) {
  int total = 0;
  for (int u : usage) total += std::max(0, u - cap);
  return total;
}

// Places operators in the order of their current steps (ties by id), each at
// the earliest step allowed by its predecessors whose modulo slot has room.
std::optional<Schedule> OrderPreservingPlacement(const Graph& graph,
                                                 const Schedule& s, int depth,
                                                 int ii, int cap) {
  const int n = graph.num_nodes();
  std::vector<NodeId> order(graph.topo_order());
  std::stable_sort(order.begin(), order.end(),
                   [&](NodeId a, NodeId b) { return s[a] < s[b]; });
  // Sorting by step keeps a topological order: s is precedence-legal.
  std::vector<int> usage(ii, 0);
  std::vector<int> steps(n, 0);
  for (NodeId id : order) {
    int t = s[id];
    for (NodeId p : graph.preds(id)) {
      t = std::max(t, steps[p] + graph.op(p).latency);
    }
    const int r = graph.op(id).resource;
    while (t < depth && usage[t % ii] + r > cap) ++t;
    if (t >= depth) return std::nullopt;
    usage[t % ii] += r;
    steps[id] = t;
  }
  return Schedule{std::move(steps)};
}

}  // namespace

ModuloLegalization RepairModuloResources(const Graph& graph, const Schedule& s,
                                         int depth, int ii, int cap) {
  ModuloLegalization result = LegalizeModulo(graph, s, depth, ii);
  if (!result.ok()) return result;
  const int n = graph.num_nodes();
  std::vector<int> usage = SlotUsage(graph, result.schedule.steps, ii);
  int excess = Excess(usage, cap);
  // Sideways moves (same excess) are allowed to leave plateaus; `seen`
  // keeps them from cycling.
  std::set<std::vector<int>> seen = {result.schedule.steps};
  for (int move = 0; excess > 0 && move < 4 * n; ++move) {
    const int worst =
        std::max_element(usage.begin(), usage.end()) - usage.begin();
    std::optional<ModuloLegalization> best;
    int best_excess = excess + 1;
    int best_shift = 0;
    for (NodeId id = 0; id < n; ++id) {
      const int r = graph.op(id).resource;
      const int from = result.schedule[id];
      if (r == 0 || from % ii != worst) continue;
      for (int to = 0; to < depth; ++to) {
        if (to % ii == worst || usage[to % ii] + r > cap) continue;
        Schedule moved = result.schedule;
        moved.steps[id] = to;
        ModuloLegalization candidate = LegalizeModulo(graph, moved, depth, ii);
        if (!candidate.ok() || seen.count(candidate.schedule.steps)) continue;
        const int e =
            Excess(SlotUsage(graph, candidate.schedule.steps, ii), cap);
        int shift = 0;
        for (NodeId k = 0; k < n; ++k) {
          shift += std::abs(candidate.schedule[k] - s[k]);
        }
        if (e < best_excess || (best && e == best_excess && shift < best_shift)) {
          best = std::move(candidate);
          best_excess = e;
          best_shift = shift;
        }
      }
    }
    if (!best) break;
    result = std::move(*best);
    seen.insert(result.schedule.steps);
    usage = SlotUsage(graph, result.schedule.steps, ii);
    excess = best_excess;
  }
  ProblemSpec check;
  check.formulation = Formulation::kC;
  check.depth = depth;
  check.ii = ii;
  check.resource_cap = cap;
  result.report = CheckFeasible(graph, result.schedule, check);
  if (!result.report.feasible) {
    // Fall back to re-placing everything in the current order, alternating
    // with the recurrence push a few times.
    Schedule current = result.schedule;
    for (int round = 0; round < 4; ++round) {
      std::optional<Schedule> placed =
          OrderPreservingPlacement(graph, current, depth, ii, cap);
      if (!placed) break;
      ModuloLegalization pushed = LegalizeModulo(graph, *placed, depth, ii);
      if (!pushed.ok()) break;
      const FeasibilityReport report =
          CheckFeasible(graph, pushed.schedule, check);
      if (report.feasible) {
        result = std::move(pushed);
        result.report = report;
        break;
      }
      current = std::move(pushed.schedule);
    }
  }
  if (!result.report.feasible) result.failure = "modulo resource conflict";
  return result;
}

GaussianParams ReinitFromSchedule(const Graph& graph, const Schedule& s,
                                  const OptimizerConfig& cfg, int depth) {
  CheckSize(graph, s);
  const DepthBounds bounds = ComputeBounds(graph, depth);
  std::vector<double> mu(s.steps.begin(), s.steps.end());
  std::vector<double> sigma(graph.num_nodes());
  for (NodeId id = 0; id < graph.num_nodes(); ++id) {
    sigma[id] = std::max(cfg.sigma_min, cfg.kappa * bounds.slack(id));
  }
  return GaussianParams(std::move(mu), sigma, cfg.sigma_min);
}

}  // namespace gsched
