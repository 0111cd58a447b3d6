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

#include "gsched/graph.h"

#include <algorithm>
#include <fstream>
#include <functional>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace gsched {

namespace {

using json = nlohmann::json;

std::string NodeName(NodeId id) { return "node " + std::to_string(id); }

}  // namespace

InfeasibleDepthError::InfeasibleDepthError(int depth, int min_depth)
    : Error("depth " + std::to_string(depth) +
            " is shorter than the critical path; minimum feasible depth is " +
            std::to_string(min_depth)),
      depth_(depth),
      min_depth_(min_depth) {}

Graph::Graph(std::vector<Operator> operators, std::vector<Edge> edges,
             std::vector<BackEdge> back_edges, std::optional<NodeId> sink)
    : operators_(std::move(operators)),
      edges_(std::move(edges)),
      back_edges_(std::move(back_edges)),
      sink_(sink) {
  const int n = num_nodes();
  for (NodeId id = 0; id < n; ++id) {
    const Operator& o = operators_[id];
    if (o.resource < 0) {
      throw Error("negative resource demand r=" + std::to_string(o.resource) +
                  " on " + NodeName(id));
    }
    if (o.bits < 0) {
      throw Error("negative bitwidth b=" + std::to_string(o.bits) + " on " +
                  NodeName(id));
    }
    if (o.latency < 1) {
      throw Error("latency must be >= 1, got " + std::to_string(o.latency) +
                  " on " + NodeName(id));
    }
  }
  auto check_endpoint = [n](NodeId id) {
    if (id < 0 || id >= n) throw Error("unknown node " + std::to_string(id));
  };

  preds_.assign(n, {});
  succs_.assign(n, {});
  std::set<Edge> seen;
  for (const Edge& e : edges_) {
    check_endpoint(e.producer);
    check_endpoint(e.consumer);
    if (e.producer == e.consumer) {
      throw Error("self-loop forward edge on " + NodeName(e.producer));
    }
    if (!seen.insert(e).second) {
      throw Error("duplicate edge [" + std::to_string(e.producer) + "," +
                  std::to_string(e.consumer) + "]");
    }
    succs_[e.producer].push_back(e.consumer);
    preds_[e.consumer].push_back(e.producer);
  }
  for (auto& list : preds_) std::sort(list.begin(), list.end());
  for (auto& list : succs_) std::sort(list.begin(), list.end());

  for (const BackEdge& be : back_edges_) {
    check_endpoint(be.consumer);
    check_endpoint(be.producer);
    if (be.distance < 1) {
      throw Error("back-edge (consumer " + std::to_string(be.consumer) +
                  ", producer " + std::to_string(be.producer) +
                  ") has distance " + std::to_string(be.distance) +
                  "; distance must be >= 1");
    }
  }
  if (sink_) {
    check_endpoint(*sink_);
    if (!succs_[*sink_].empty()) {
      throw Error("sink " + NodeName(*sink_) + " has successors");
    }
  }

  // Kahn's algorithm; the min-heap breaks ties by ascending id.
  std::vector<int> indegree(n);
  for (NodeId id = 0; id < n; ++id) {
    indegree[id] = static_cast<int>(preds_[id].size());
  }
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
  for (NodeId id = 0; id < n; ++id) {
    if (indegree[id] == 0) ready.push(id);
  }
  topo_.reserve(n);
  while (!ready.empty()) {
    NodeId id = ready.top();
    ready.pop();
    topo_.push_back(id);
    for (NodeId s : succs_[id]) {
      if (--indegree[s] == 0) ready.push(s);
    }
  }
  if (static_cast<int>(topo_.size()) != n) {
    NodeId on_cycle = 0;
    while (indegree[on_cycle] == 0) ++on_cycle;
    throw Error("cycle in forward edges (through " + NodeName(on_cycle) + ")");
  }
}

int Graph::max_resource() const {
  int result = 0;
  for (const Operator& o : operators_) result = std::max(result, o.resource);
  return result;
}

bool Graph::operator==(const Graph& other) const {
  return operators_ == other.operators_ && edges_ == other.edges_ &&
         back_edges_ == other.back_edges_ && sink_ == other.sink_;
}

Graph ParseGraph(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array()) {
    throw ParseError("graph document must be an object with a \"nodes\" array");
  }

  try {
    std::unordered_map<long long, NodeId> remap;
    std::vector<Operator> ops;
    for (const json& node : doc["nodes"]) {
      if (!node.is_object() || !node.contains("id")) {
        throw ParseError("node entry without \"id\": " + node.dump());
      }
      const long long raw = node.at("id").get<long long>();
      if (!remap.emplace(raw, static_cast<NodeId>(ops.size())).second) {
        throw ParseError("duplicate node id " + std::to_string(raw));
      }
      Operator o;
      o.resource = node.value("r", 1);
      o.bits = node.value("b", 1);
      o.latency = node.value("lat", 1);
      if (o.resource < 0 || o.bits < 0) {
        throw ParseError("negative weight on node " + std::to_string(raw));
      }
      ops.push_back(o);
    }
    auto lookup = [&remap](const json& v) {
      const long long raw = v.get<long long>();
      auto it = remap.find(raw);
      if (it == remap.end()) {
        throw ParseError("unknown node " + std::to_string(raw));
      }
      return it->second;
    };

    std::vector<Edge> edges;
    if (doc.contains("edges")) {
      for (const json& e : doc["edges"]) {
        if (!e.is_array() || e.size() != 2) {
          throw ParseError("edge must be a [producer, consumer] pair: " +
                           e.dump());
        }
        edges.push_back({lookup(e[0]), lookup(e[1])});
      }
    }
    std::vector<BackEdge> back_edges;
    if (doc.contains("back_edges")) {
      for (const json& be : doc["back_edges"]) {
        back_edges.push_back({lookup(be.at("consumer")),
                              lookup(be.at("producer")),
                              be.value("distance", 1)});
      }
    }
    std::optional<NodeId> sink;
    if (doc.contains("sink") && !doc["sink"].is_null()) {
      sink = lookup(doc["sink"]);
    }
    return Graph(std::move(ops), std::move(edges), std::move(back_edges),
                 sink);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what());
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid graph document: ") + e.what());
  }
}

std::string SerializeGraph(const Graph& graph) {
  json doc;
  doc["nodes"] = json::array();
  for (NodeId id = 0; id < graph.num_nodes(); ++id) {
    const Operator& o = graph.op(id);
    doc["nodes"].push_back(
        {{"id", id}, {"r", o.resource}, {"b", o.bits}, {"lat", o.latency}});
  }
  doc["edges"] = json::array();
  for (const Edge& e : graph.edges()) {
    doc["edges"].push_back({e.producer, e.consumer});
  }
  doc["back_edges"] = json::array();
  for (const BackEdge& be : graph.back_edges()) {
    doc["back_edges"].push_back({{"consumer", be.consumer},
                                 {"producer", be.producer},
                                 {"distance", be.distance}});
  }
  if (graph.sink()) doc["sink"] = *graph.sink();
  return doc.dump() + "\n";
}

Graph ReadGraphFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open graph file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseGraph(buffer.str());
}

Graph AddSink(const Graph& graph) {
  if (graph.has_explicit_sink()) return graph;
  std::vector<Operator> ops = graph.operators();
  std::vector<Edge> edges = graph.edges();
  const NodeId sink = graph.num_nodes();
  for (NodeId id = 0; id < graph.num_nodes(); ++id) {
    if (graph.succs(id).empty()) edges.push_back({id, sink});
  }
  ops.push_back({.resource = 0, .bits = 0, .latency = 1});
  return Graph(std::move(ops), std::move(edges), graph.back_edges(), sink);
}

std::vector<NodeId> TopoOrder(const Graph& graph) { return graph.topo_order(); }

std::vector<int> LongestPathFromSources(const Graph& graph) {
  std::vector<int> start(graph.num_nodes(), 0);
  for (NodeId id : graph.topo_order()) {
    for (NodeId p : graph.preds(id)) {
      start[id] = std::max(start[id], start[p] + graph.op(p).latency);
    }
  }
  return start;
}

std::vector<int> LongestPathToSinks(const Graph& graph) {
  std::vector<int> tail(graph.num_nodes(), 0);
  const auto& order = graph.topo_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    for (NodeId s : graph.succs(*it)) {
      tail[*it] = std::max(tail[*it], graph.op(*it).latency + tail[s]);
    }
  }
  return tail;
}

int MinFeasibleDepth(const Graph& graph) {
  const std::vector<int> head = LongestPathFromSources(graph);
  const std::vector<int> tail = LongestPathToSinks(graph);
  int depth = 0;
  for (NodeId id = 0; id < graph.num_nodes(); ++id) {
    depth = std::max(depth, head[id] + tail[id] + 1);
  }
  return depth;
}

DepthBounds ComputeBounds(const Graph& graph, int depth) {
  const int min_depth = MinFeasibleDepth(graph);
  if (depth < min_depth) throw InfeasibleDepthError(depth, min_depth);
  DepthBounds bounds;
  bounds.asap = LongestPathFromSources(graph);
  bounds.alap = LongestPathToSinks(graph);
  for (int& v : bounds.alap) v = depth - 1 - v;
  return bounds;
}

}  // namespace gsched
