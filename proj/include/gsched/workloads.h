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

#ifndef GSCHED_WORKLOADS_H_
#define GSCHED_WORKLOADS_H_

#include <cstdint>

#include "gsched/graph.h"

namespace gsched {

inline constexpr double kDefaultBackEdgeRatio = 0.02;
inline constexpr int kDefaultMaxDistance = 3;

// Layered random DAG. Nodes are split into `depth` non-empty layers (ids are
// assigned layer by layer). Every node outside the first layer gets one edge
// from a random node of the previous layer, so the critical path is exactly
// `depth`; every other earlier-to-later pair is added with probability
// `density`. r and b are drawn uniformly from {1, 2, 3}.
Graph GenerateRandomDag(int nodes, int depth, double density, uint64_t seed);

// Adds floor(ratio * |V|) distinct back-edges, each from a random ancestor
// (consumer) to one of its descendants (producer) with a distance drawn
// uniformly from [1, max_distance]. Throws Error when no ancestor/descendant
// pair is left to pick.
Graph AugmentBackEdges(const Graph& graph, double ratio, int max_distance,
                       uint64_t seed);

}  // namespace gsched

#endif  // GSCHED_WORKLOADS_H_
