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

#include "gsched/workloads.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <utility>

namespace gsched {

namespace {

// Descendants of `root` through forward edges, ascending.
std::vector<NodeId> Descendants(const Graph& graph, NodeId root) {
  std::vector<char> seen(graph.num_nodes(), 0);
  std::vector<NodeId> stack(graph.succs(root).begin(), graph.succs(root).end());
  std::vector<NodeId> out;
  while (!stack.empty()) {
    NodeId id = stack.back();
    stack.pop_back();
    if (seen[id]) continue;
    seen[id] = 1;
    out.push_back(id);
    for (NodeId s : graph.succs(id)) {
      if (!seen[s]) stack.push_back(s);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Graph GenerateRandomDag(int nodes, int depth, double density, uint64_t seed) {
  if (depth < 1 || nodes < depth) {
    throw Error("random DAG needs nodes >= depth >= 1, got nodes=" +
                std::to_string(nodes) + " depth=" + std::to_string(depth));
  }
  if (!(density > 0.0 && density <= 1.0)) {
    throw Error("density must lie in (0, 1]");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick_layer(0, depth - 1);
  std::uniform_int_distribution<int> pick_weight(1, 3);
  std::bernoulli_distribution keep(density);

  std::vector<int> layer_size(depth, 1);
  for (int k = depth; k < nodes; ++k) ++layer_size[pick_layer(rng)];
  std::vector<int> layer_start(depth + 1, 0);
  for (int l = 0; l < depth; ++l) {
    layer_start[l + 1] = layer_start[l] + layer_size[l];
  }

  std::vector<Operator> ops(nodes);
  for (Operator& o : ops) {
    o.resource = pick_weight(rng);
    o.bits = pick_weight(rng);
  }

  std::vector<Edge> edges;
  for (int l = 1; l < depth; ++l) {
    for (NodeId v = layer_start[l]; v < layer_start[l + 1]; ++v) {
      std::uniform_int_distribution<int> pick_parent(layer_start[l - 1],
                                                     layer_start[l] - 1);
      const NodeId parent = pick_parent(rng);
      for (NodeId u = 0; u < layer_start[l]; ++u) {
        if (u == parent || keep(rng)) edges.push_back({u, v});
      }
    }
  }
  std::sort(edges.begin(), edges.end());
  return Graph(std::move(ops), std::move(edges));
}

Graph AugmentBackEdges(const Graph& graph, double ratio, int max_distance,
                       uint64_t seed) {
  if (!(ratio >= 0.0)) throw Error("back-edge ratio must be non-negative");
  if (max_distance < 1) throw Error("max distance must be >= 1");
  const int count =
      static_cast<int>(std::floor(ratio * graph.num_nodes() + 1e-9));
  if (count == 0) return graph;

  std::vector<NodeId> ancestors;
  for (NodeId id = 0; id < graph.num_nodes(); ++id) {
    if (!graph.succs(id).empty()) ancestors.push_back(id);
  }
  if (ancestors.empty()) {
    throw Error("no ancestor/descendant pair available for back-edges");
  }

  std::set<std::pair<NodeId, NodeId>> taken;
  for (const BackEdge& be : graph.back_edges()) {
    taken.insert({be.consumer, be.producer});
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick_distance(1, max_distance);
  std::vector<BackEdge> back_edges = graph.back_edges();
  int added = 0;
  while (added < count) {
    if (ancestors.empty()) {
      throw Error("only " + std::to_string(added) + " of " +
                  std::to_string(count) +
                  " back-edges could be placed on distinct pairs");
    }
    std::uniform_int_distribution<size_t> pick_ancestor(0,
                                                        ancestors.size() - 1);
    const size_t slot = pick_ancestor(rng);
    const NodeId consumer = ancestors[slot];
    std::vector<NodeId> free;
    for (NodeId d : Descendants(graph, consumer)) {
      if (!taken.count({consumer, d})) free.push_back(d);
    }
    if (free.empty()) {
      ancestors.erase(ancestors.begin() + slot);
      continue;
    }
    std::uniform_int_distribution<size_t> pick_descendant(0, free.size() - 1);
    const NodeId producer = free[pick_descendant(rng)];
    taken.insert({consumer, producer});
    back_edges.push_back({consumer, producer, pick_distance(rng)});
    ++added;
  }
  return Graph(graph.operators(), graph.edges(), std::move(back_edges),
               graph.sink());
}

}  // namespace gsched
