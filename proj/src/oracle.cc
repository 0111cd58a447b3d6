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

#include "gsched/oracle.h"

#include <functional>

namespace gsched {

namespace {

// Constraint between node `self` and an earlier-enumerated node `other`:
// s[lhs] + gap <= s[rhs].
struct PairConstraint {
  NodeId lhs;
  NodeId rhs;
  int gap;
};

}  // namespace

OracleResult EnumerateOptimal(const Graph& graph, const ProblemSpec& spec,
                              const OracleLimits& limits) {
  spec.Validate(graph);
  const int n = graph.num_nodes();
  if (n > limits.max_nodes) {
    throw Error("oracle limited to " + std::to_string(limits.max_nodes) +
                " nodes, graph has " + std::to_string(n));
  }
  if (spec.depth > limits.max_depth) {
    throw Error("oracle limited to depth " + std::to_string(limits.max_depth) +
                ", got " + std::to_string(spec.depth));
  }
  const DepthBounds bounds = ComputeBounds(graph, spec.depth);

  // Pair constraints are checked once both endpoints are assigned, i.e. when
  // the larger id is placed.
  std::vector<std::vector<PairConstraint>> checks(n);
  for (const Edge& e : graph.edges()) {
    const int gap = spec.dep_margin == DepMargin::kLatency
                        ? graph.op(e.producer).latency
                        : 0;
    checks[std::max(e.producer, e.consumer)].push_back(
        {e.producer, e.consumer, gap});
  }
  if (spec.is_modulo()) {
    // s_j + Lat(j) - k*II <= s_i
    for (const BackEdge& be : graph.back_edges()) {
      checks[std::max(be.consumer, be.producer)].push_back(
          {be.producer, be.consumer,
           graph.op(be.producer).latency - be.distance * spec.ii});
    }
  }
  const bool capped_modulo = spec.is_modulo() && spec.resource_cap.has_value();
  std::vector<int> slot_usage(capped_modulo ? spec.ii : 0, 0);

  OracleResult result;
  Schedule current{std::vector<int>(n, 0)};

  std::function<void(NodeId)> visit = [&](NodeId id) {
    if (id == n) {
      ++result.leaves;
      if (!CheckFeasible(graph, current, spec).feasible) return;
      const double objective = EvalObjective(graph, current, spec);
      if (!result.schedule || objective < result.objective) {
        result.schedule = current;
        result.objective = objective;
      }
      return;
    }
    const int r = graph.op(id).resource;
    for (int t = bounds.asap[id]; t <= bounds.alap[id]; ++t) {
      current.steps[id] = t;
      bool ok = true;
      for (const PairConstraint& c : checks[id]) {
        if (current[c.lhs] + c.gap > current[c.rhs]) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      if (capped_modulo) {
        int& used = slot_usage[t % spec.ii];
        if (used + r > *spec.resource_cap) continue;
        used += r;
        visit(id + 1);
        used -= r;
      } else {
        visit(id + 1);
      }
    }
  };
  visit(0);
  return result;
}

}  // namespace gsched
