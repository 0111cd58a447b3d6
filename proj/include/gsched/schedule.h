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

#ifndef GSCHED_SCHEDULE_H_
#define GSCHED_SCHEDULE_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gsched/graph.h"

namespace gsched {

// A: peak resource + alpha * communication (regular schedule).
// B: peak memory (regular schedule).
// C: peak modulo memory subject to a modulo resource cap and recurrences.
enum class Formulation { kA, kB, kC };

// How a forward edge (i, j) constrains steps:
//   kLatency:  s_i + Lat(i) <= s_j
//   kChaining: s_i <= s_j
enum class DepMargin { kChaining, kLatency };

// Which recurrence bound the relaxed violation counts:
//   kStrict:   s_j >= s_i + k*II - Lat(j) + 1 is a violation (matches the
//              discrete constraint s_i + k*II >= s_j + Lat(j)).
//   kStart:    s_j >= s_i + k*II + 1 is a violation (start steps only).
enum class RecMargin { kStrict, kStart };

std::string_view FormulationName(Formulation f);
Formulation ParseFormulation(std::string_view text);

struct ProblemSpec {
  Formulation formulation = Formulation::kB;
  int depth = 1;
  int ii = 0;                        // initiation interval, C only
  std::optional<int> resource_cap;  // required for C, optional for A
  double alpha = 0.0;
  DepMargin dep_margin = DepMargin::kLatency;
  RecMargin rec_margin = RecMargin::kStrict;

  bool is_modulo() const { return formulation == Formulation::kC; }
  bool uses_memory() const { return formulation != Formulation::kA; }

  // Throws Error when the spec is inconsistent with itself or with `graph`.
  void Validate(const Graph& graph) const;
};

struct Schedule {
  std::vector<int> steps;

  int size() const { return static_cast<int>(steps.size()); }
  int operator[](NodeId id) const { return steps[id]; }
  bool operator==(const Schedule&) const = default;
};

std::string SerializeSchedule(const Schedule& s);
Schedule ParseSchedule(std::string_view text);

struct FeasibilityReport {
  int dep_violations = 0;
  int lat_violations = 0;
  int rec_violations = 0;
  int res_violations = 0;  // total excess units over the modulo cap
  bool feasible = true;

  std::string ToJson() const;
};

// Checks every constraint that applies to `spec`: Dep and Lat always, Rec and
// the modulo resource cap for Formulation C. A cap given with Formulation A is
// a list-scheduling budget only and is not checked here.
FeasibilityReport CheckFeasible(const Graph& graph, const Schedule& s,
                                const ProblemSpec& spec);

// Dep + Lat + Rec only (what the legalization passes can repair).
FeasibilityReport CheckPrecedence(const Graph& graph, const Schedule& s,
                                  const ProblemSpec& spec);

struct Profile {
  std::vector<int> values;
  int peak = 0;
};

// Per-step resource usage Res(d) = sum_i r_i [s_i = d] over d in [0, depth).
Profile EvalResource(const Graph& graph, const Schedule& s, int depth);

// Per-step live storage Mem(d) = sum_i b_i [s_i <= d < max_{j in succ(i)} s_j].
// Requires a sink-augmented graph (or no leaf with b > 0).
Profile EvalMemory(const Graph& graph, const Schedule& s, int depth);

// Sum over forward edges of s_j - s_i.
int EvalComm(const Graph& graph, const Schedule& s);

// Wraps a linear profile modulo `ii`: out[t] = sum_k in[t + k*ii].
std::vector<int> WrapProfile(const std::vector<int>& linear, int ii);

Profile EvalModuloResource(const Graph& graph, const Schedule& s, int ii);
Profile EvalModuloMemory(const Graph& graph, const Schedule& s, int ii,
                         int depth);

// A: peak Res + alpha * comm; B: peak Mem; C: peak MMem. Defined on
// infeasible schedules as long as every step lies in [0, depth).
double EvalObjective(const Graph& graph, const Schedule& s,
                     const ProblemSpec& spec);

}  // namespace gsched

#endif  // GSCHED_SCHEDULE_H_
