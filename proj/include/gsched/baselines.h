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

// Classical heuristic schedulers used as comparison points.

#ifndef GSCHED_BASELINES_H_
#define GSCHED_BASELINES_H_

#include <optional>
#include <string>
#include <string_view>

#include "gsched/graph.h"
#include "gsched/schedule.h"

namespace gsched {

// A schedule, or the reason none was produced.
struct ScheduleOutcome {
  std::optional<Schedule> schedule;
  std::string failure;

  bool ok() const { return schedule.has_value(); }
};

Schedule AsapSchedule(const Graph& graph, int depth);
Schedule AlapSchedule(const Graph& graph, int depth);

// Cycle-by-cycle list scheduling. Ready operators are taken in descending
// critical-path-to-sink order (ties by id). With a resource cap (A or C) an
// operator that does not fit in the current step, or for C in the current
// modulo slot, is deferred. Fails if some operator cannot be placed within
// the depth bound.
ScheduleOutcome ListSchedule(const Graph& graph, const ProblemSpec& spec);

// Which per-node weight feeds the FDS distribution graph.
enum class FdsWeight { kResource, kMemory };

// Force-directed scheduling: repeatedly fixes the (operator, step) pair with
// the smallest total force (self force plus the forces implied on direct
// predecessors and successors) until every time frame is a single step.
// Never leaves [asap, alap]. Throws InfeasibleDepthError for a short depth.
Schedule ForceDirectedSchedule(const Graph& graph, int depth,
                               FdsWeight weight);

enum class BaselineMethod { kAsap, kAlap, kList, kFds };
BaselineMethod ParseBaselineMethod(std::string_view text);
std::string_view BaselineMethodName(BaselineMethod m);

struct BaselineRun {
  ScheduleOutcome outcome;
  FeasibilityReport report;
  double objective = 0.0;  // valid when outcome.ok() and report.feasible
};

// Runs a baseline for `spec`. For Formulation C the heuristic schedule is
// modulo-legalized afterwards and checked against every constraint.
BaselineRun RunBaseline(BaselineMethod method, const Graph& graph,
                        const ProblemSpec& spec);

}  // namespace gsched

#endif  // GSCHED_BASELINES_H_
