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

#include "gsched/schedule.h"

#include <algorithm>

#include "json.hpp"

namespace gsched {

namespace {

using json = nlohmann::json;

void CheckSize(const Graph& graph, const Schedule& s) {
  if (s.size() != graph.num_nodes()) {
    throw Error("schedule has " + std::to_string(s.size()) +
                " steps but the graph has " +
                std::to_string(graph.num_nodes()) + " nodes");
  }
}

void CheckRange(const Schedule& s, int depth) {
  for (NodeId id = 0; id < s.size(); ++id) {
    if (s[id] < 0 || s[id] >= depth) {
      throw Error("step " + std::to_string(s[id]) + " of node " +
                  std::to_string(id) + " is outside [0, " +
                  std::to_string(depth - 1) + "]");
    }
  }
}

Profile MakeProfile(std::vector<int> values) {
  Profile p;
  p.peak = values.empty() ? 0 : *std::max_element(values.begin(), values.end());
  p.values = std::move(values);
  return p;
}

}  // namespace

std::string_view FormulationName(Formulation f) {
  switch (f) {
    case Formulation::kA:
      return "A";
    case Formulation::kB:
      return "B";
    case Formulation::kC:
      return "C";
  }
  return "?";
}

Formulation ParseFormulation(std::string_view text) {
  if (text == "A" || text == "a") return Formulation::kA;
  if (text == "B" || text == "b") return Formulation::kB;
  if (text == "C" || text == "c") return Formulation::kC;
  throw Error("unknown formulation '" + std::string(text) + "'");
}

void ProblemSpec::Validate(const Graph& graph) const {
  if (depth < 1) throw Error("depth must be >= 1");
  if (alpha < 0) throw Error("alpha must be non-negative");
  if (resource_cap && *resource_cap < 0) {
    throw Error("resource cap must be non-negative");
  }
  if (formulation == Formulation::kC) {
    if (ii < 1 || ii > depth) {
      throw Error("initiation interval must satisfy 1 <= II <= D, got II=" +
                  std::to_string(ii));
    }
    if (!resource_cap) throw Error("formulation C requires a resource cap");
    if (*resource_cap < graph.max_resource()) {
      throw Error("resource cap " + std::to_string(*resource_cap) +
                  " is below the largest single demand " +
                  std::to_string(graph.max_resource()));
    }
  }
}

std::string SerializeSchedule(const Schedule& s) {
  json doc;
  doc["steps"] = s.steps;
  return doc.dump() + "\n";
}

Schedule ParseSchedule(std::string_view text) {
  try {
    json doc = json::parse(text);
    return Schedule{doc.at("steps").get<std::vector<int>>()};
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid schedule document: ") + e.what());
  }
}

std::string FeasibilityReport::ToJson() const {
  json doc = {{"dep_violations", dep_violations},
              {"lat_violations", lat_violations},
              {"rec_violations", rec_violations},
              {"res_violations", res_violations},
              {"feasible", feasible}};
  return doc.dump();
}

FeasibilityReport CheckPrecedence(const Graph& graph, const Schedule& s,
                                  const ProblemSpec& spec) {
  CheckSize(graph, s);
  FeasibilityReport report;
  for (const Edge& e : graph.edges()) {
    const int margin = spec.dep_margin == DepMargin::kLatency
                           ? graph.op(e.producer).latency
                           : 0;
    if (s[e.producer] + margin > s[e.consumer]) ++report.dep_violations;
  }
  for (NodeId id = 0; id < s.size(); ++id) {
    if (s[id] < 0 || s[id] > spec.depth - 1) ++report.lat_violations;
  }
  if (spec.is_modulo()) {
    for (const BackEdge& be : graph.back_edges()) {
      if (s[be.consumer] + be.distance * spec.ii <
          s[be.producer] + graph.op(be.producer).latency) {
        ++report.rec_violations;
      }
    }
  }
  report.feasible = report.dep_violations == 0 && report.lat_violations == 0 &&
                    report.rec_violations == 0;
  return report;
}

FeasibilityReport CheckFeasible(const Graph& graph, const Schedule& s,
                                const ProblemSpec& spec) {
  FeasibilityReport report = CheckPrecedence(graph, s, spec);
  if (spec.is_modulo() && spec.resource_cap) {
    std::vector<int> usage(spec.ii, 0);
    for (NodeId id = 0; id < s.size(); ++id) {
      if (s[id] >= 0) usage[s[id] % spec.ii] += graph.op(id).resource;
    }
    for (int u : usage) {
      report.res_violations += std::max(0, u - *spec.resource_cap);
    }
  }
  report.feasible = report.feasible && report.res_violations == 0;
  return report;
}

Profile EvalResource(const Graph& graph, const Schedule& s, int depth) {
  CheckSize(graph, s);
  CheckRange(s, depth);
  std::vector<int> values(depth, 0);
  for (NodeId id = 0; id < s.size(); ++id) {
    values[s[id]] += graph.op(id).resource;
  }
  return MakeProfile(std::move(values));
}

Profile EvalMemory(const Graph& graph, const Schedule& s, int depth) {
  CheckSize(graph, s);
  CheckRange(s, depth);
  std::vector<int> values(depth, 0);
  for (NodeId id = 0; id < s.size(); ++id) {
    const int bits = graph.op(id).bits;
    if (bits == 0) continue;
    if (graph.succs(id).empty()) {
      throw Error("node " + std::to_string(id) +
                  " has storage but no successor; add a sink (AddSink) before "
                  "evaluating memory");
    }
    int last_use = s[id];
    for (NodeId j : graph.succs(id)) last_use = std::max(last_use, s[j]);
    for (int d = s[id]; d < last_use; ++d) values[d] += bits;
  }
  return MakeProfile(std::move(values));
}

int EvalComm(const Graph& graph, const Schedule& s) {
  CheckSize(graph, s);
  int total = 0;
  for (const Edge& e : graph.edges()) total += s[e.consumer] - s[e.producer];
  return total;
}

std::vector<int> WrapProfile(const std::vector<int>& linear, int ii) {
  if (ii < 1) throw Error("initiation interval must be >= 1");
  std::vector<int> wrapped(ii, 0);
  for (size_t d = 0; d < linear.size(); ++d) wrapped[d % ii] += linear[d];
  return wrapped;
}

Profile EvalModuloResource(const Graph& graph, const Schedule& s, int ii) {
  CheckSize(graph, s);
  if (ii < 1) throw Error("initiation interval must be >= 1");
  std::vector<int> values(ii, 0);
  for (NodeId id = 0; id < s.size(); ++id) {
    if (s[id] < 0) {
      throw Error("negative step on node " + std::to_string(id));
    }
    values[s[id] % ii] += graph.op(id).resource;
  }
  return MakeProfile(std::move(values));
}

Profile EvalModuloMemory(const Graph& graph, const Schedule& s, int ii,
                         int depth) {
  return MakeProfile(WrapProfile(EvalMemory(graph, s, depth).values, ii));
}

double EvalObjective(const Graph& graph, const Schedule& s,
                     const ProblemSpec& spec) {
  switch (spec.formulation) {
    case Formulation::kA:
      return EvalResource(graph, s, spec.depth).peak +
             spec.alpha * EvalComm(graph, s);
    case Formulation::kB:
      return EvalMemory(graph, s, spec.depth).peak;
    case Formulation::kC:
      return EvalModuloMemory(graph, s, spec.ii, spec.depth).peak;
  }
  return 0.0;
}

}  // namespace gsched
