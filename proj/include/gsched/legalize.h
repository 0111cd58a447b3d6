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

// Greedy repair of rounded schedules.

#ifndef GSCHED_LEGALIZE_H_
#define GSCHED_LEGALIZE_H_

#include <optional>
#include <string>

#include "gsched/graph.h"
#include "gsched/optimizer_config.h"
#include "gsched/relax.h"
#include "gsched/schedule.h"

namespace gsched {

// Clamps every step into [asap, alap], then walks the graph in topological
// order pushing each node to at least max_pred(s_u + Lat(u)). The result is
// Dep (latency margin) and Lat feasible and never below ASAP.
// Throws InfeasibleDepthError if `depth` is below the critical path.
Schedule LegalizeRegular(const Graph& graph, const Schedule& s, int depth);

struct ModuloLegalization {
  Schedule schedule;  // last iterate, even on failure
  FeasibilityReport report;
  int passes = 0;
  bool converged = false;
  std::string failure;  // empty on success

  bool ok() const { return failure.empty(); }
};

// Fixed-point push over forward edges and back-edges, at most |V| passes. Each
// node moves up to max(max_pred(s_u + Lat(u)), max_back(s_j - k*II + Lat(j))).
// Failure (recurrence conflict or depth overflow) is reported in the result;
// it is not an exception.
ModuloLegalization LegalizeModulo(const Graph& graph, const Schedule& s,
                                  int depth, int ii);

// Greedy repair of the modulo reservation table for a schedule that already
// satisfies Dep, Lat and Rec. While some slot t % II exceeds `cap`, moves one
// operator of the most loaded slot to the step with room that, after the
// LegalizeModulo push, leaves the smallest total excess (ties: smallest
// displacement). Fails when no move reduces the excess.
ModuloLegalization RepairModuloResources(const Graph& graph, const Schedule& s,
                                         int depth, int ii, int cap);

// mu = s; sigma = max(sigma_min, kappa * (alap - asap)).
GaussianParams ReinitFromSchedule(const Graph& graph, const Schedule& s,
                                  const OptimizerConfig& cfg, int depth);

}  // namespace gsched

#endif  // GSCHED_LEGALIZE_H_
