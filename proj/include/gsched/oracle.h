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

// Exhaustive search for tiny instances. Used as ground truth in tests.

#ifndef GSCHED_ORACLE_H_
#define GSCHED_ORACLE_H_

#include <cstdint>
#include <optional>

#include "gsched/graph.h"
#include "gsched/schedule.h"

namespace gsched {

struct OracleLimits {
  int max_nodes = 8;
  int max_depth = 6;
};

struct OracleResult {
  std::optional<Schedule> schedule;  // empty when no schedule is feasible
  double objective = 0.0;
  int64_t leaves = 0;  // complete assignments evaluated

  bool feasible() const { return schedule.has_value(); }
};

// Enumerates every assignment inside the [asap, alap] windows, keeps those
// passing CheckFeasible and returns the one with the smallest objective.
// Among equal objectives the lexicographically smallest schedule wins.
// Throws Error if the instance exceeds `limits`.
OracleResult EnumerateOptimal(const Graph& graph, const ProblemSpec& spec,
                              const OracleLimits& limits = {});

}  // namespace gsched

#endif  // GSCHED_ORACLE_H_
