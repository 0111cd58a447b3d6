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

#ifndef GSCHED_GRAPH_H_
#define GSCHED_GRAPH_H_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gsched {

using NodeId = int;

// Base class for all errors raised on invalid inputs.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// Raised when the depth bound is shorter than the critical path. Carries the
// smallest depth that admits a schedule.
class InfeasibleDepthError : public Error {
 public:
  InfeasibleDepthError(int depth, int min_depth);
  int depth() const { return depth_; }
  int min_depth() const { return min_depth_; }

 private:
  int depth_;
  int min_depth_;
};

struct Operator {
  int resource = 1;  // functional-unit slots
  int bits = 1;      // storage units for the output value
  int latency = 1;

  bool operator==(const Operator&) const = default;
};

// Forward dependency: `consumer` may start only after `producer`.
struct Edge {
  NodeId producer;
  NodeId consumer;

  bool operator==(const Edge&) const = default;
  auto operator<=>(const Edge&) const = default;
};

// Loop-carried dependency. The value produced by `producer` in iteration n is
// read by `consumer` in iteration n + distance, which imposes
//   s[consumer] + distance * II >= s[producer] + Lat(producer).
struct BackEdge {
  NodeId consumer;
  NodeId producer;
  int distance = 1;

  bool operator==(const BackEdge&) const = default;
};

// Immutable operator DAG. Construction validates every invariant, so any Graph
// value in hand is acyclic over forward edges with in-range endpoints.
class Graph {
 public:
  Graph() = default;
  Graph(std::vector<Operator> operators, std::vector<Edge> edges,
        std::vector<BackEdge> back_edges = {},
        std::optional<NodeId> sink = std::nullopt);

  int num_nodes() const { return static_cast<int>(operators_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const std::vector<Operator>& operators() const { return operators_; }
  const Operator& op(NodeId id) const { return operators_[id]; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<BackEdge>& back_edges() const { return back_edges_; }
  const std::vector<NodeId>& preds(NodeId id) const { return preds_[id]; }
  const std::vector<NodeId>& succs(NodeId id) const { return succs_[id]; }

  bool has_explicit_sink() const { return sink_.has_value(); }
  std::optional<NodeId> sink() const { return sink_; }

  // Producer-first order with ties broken by ascending id.
  const std::vector<NodeId>& topo_order() const { return topo_; }

  int max_resource() const;

  bool operator==(const Graph& other) const;

 private:
  std::vector<Operator> operators_;
  std::vector<Edge> edges_;
  std::vector<BackEdge> back_edges_;
  std::optional<NodeId> sink_;
  std::vector<std::vector<NodeId>> preds_;
  std::vector<std::vector<NodeId>> succs_;
  std::vector<NodeId> topo_;
};

struct DepthBounds {
  std::vector<int> asap;
  std::vector<int> alap;

  int slack(NodeId id) const { return alap[id] - asap[id]; }
};

// Parses the JSON graph format:
//   {"nodes":[{"id":0,"r":1,"b":1,"lat":1},...],
//    "edges":[[producer,consumer],...],
//    "back_edges":[{"consumer":i,"producer":j,"distance":k},...],
//    "sink": id}
// Node ids are remapped to 0..n-1 in declaration order. Throws ParseError.
Graph ParseGraph(std::string_view text);
std::string SerializeGraph(const Graph& graph);

Graph ReadGraphFile(const std::string& path);

// Appends a zero-weight sink fed by every node without successors. No-op on a
// graph that already carries an explicit sink.
Graph AddSink(const Graph& graph);

std::vector<NodeId> TopoOrder(const Graph& graph);

// Longest latency-weighted path from any source to the start of each node.
std::vector<int> LongestPathFromSources(const Graph& graph);
// Longest latency-weighted path from the start of each node to the start of
// its latest descendant (0 for nodes without successors).
std::vector<int> LongestPathToSinks(const Graph& graph);

// Smallest depth D such that every node fits in steps [0, D-1].
int MinFeasibleDepth(const Graph& graph);

// ASAP/ALAP start steps under depth bound `depth`. Back-edges are ignored.
// Throws InfeasibleDepthError when `depth` < MinFeasibleDepth(graph).
DepthBounds ComputeBounds(const Graph& graph, int depth);

}  // namespace gsched

#endif  // GSCHED_GRAPH_H_
