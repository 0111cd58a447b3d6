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

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "gsched/schedule.h"

namespace gsched {
namespace {

TEST(GenerateRandomDagTest, OneNodePerLayerIsChain) {
  const Graph g = GenerateRandomDag(5, 5, 0.01, 1);
  EXPECT_EQ(MinFeasibleDepth(g), 5);
  for (int i = 0; i + 1 < 5; ++i) {
    EXPECT_NE(std::find(g.succs(i).begin(), g.succs(i).end(), i + 1),
              g.succs(i).end());
  }
}

TEST(GenerateRandomDagTest, DensityOneIsComplete) {
  const Graph g = GenerateRandomDag(12, 4, 1.0, 2);
  const std::vector<int> layer = LongestPathFromSources(g);
  int expected = 0;
  for (int u = 0; u < 12; ++u) {
    for (int v = 0; v < 12; ++v) expected += layer[u] < layer[v];
  }
  EXPECT_EQ(g.num_edges(), expected);
}

TEST(GenerateRandomDagTest, PropertiesAndDeterminism) {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = GenerateRandomDag(40, 7, 0.1, seed);
    EXPECT_EQ(g.num_nodes(), 40);
    EXPECT_EQ(MinFeasibleDepth(g), 7);
    for (const Operator& o : g.operators()) {
      EXPECT_GE(o.resource, 1);
      EXPECT_LE(o.resource, 3);
      EXPECT_GE(o.bits, 1);
      EXPECT_LE(o.bits, 3);
    }
    EXPECT_EQ(g, GenerateRandomDag(40, 7, 0.1, seed));
    EXPECT_EQ(ParseGraph(SerializeGraph(g)), g);
  }
  EXPECT_FALSE(GenerateRandomDag(40, 7, 0.1, 1) ==
               GenerateRandomDag(40, 7, 0.1, 2));
}

TEST(GenerateRandomDagTest, InvalidParameters) {
  EXPECT_THROW(GenerateRandomDag(3, 5, 0.5, 0), Error);
  EXPECT_THROW(GenerateRandomDag(5, 0, 0.5, 0), Error);
  EXPECT_THROW(GenerateRandomDag(5, 3, 0.0, 0), Error);
  EXPECT_THROW(GenerateRandomDag(5, 3, 1.5, 0), Error);
}

TEST(AugmentBackEdgesTest, ZeroRatioIsIdentity) {
  const Graph g = GenerateRandomDag(10, 4, 0.3, 3);
  EXPECT_EQ(AugmentBackEdges(g, 0.0, 3, 1), g);
}

TEST(AugmentBackEdgesTest, ChainGetsOneBackEdge) {
  const Graph g = GenerateRandomDag(5, 5, 0.01, 4);
  const Graph h = AugmentBackEdges(g, 0.2, 3, 5);
  ASSERT_EQ(h.back_edges().size(), 1u);
  const BackEdge& be = h.back_edges()[0];
  EXPECT_LT(be.consumer, be.producer);
  EXPECT_GE(be.distance, 1);
  EXPECT_LE(be.distance, 3);
  EXPECT_EQ(h.edges(), g.edges());
}

TEST(AugmentBackEdgesTest, AncestorPairsAndModuloFeasibility) {
  const Graph g = GenerateRandomDag(50, 8, 0.1, 6);
  const Graph h = AugmentBackEdges(g, 0.1, 3, 7);
  ASSERT_EQ(h.back_edges().size(), 5u);
  std::set<std::pair<int, int>> pairs;
  const std::vector<int> depth_of = LongestPathFromSources(h);
  for (const BackEdge& be : h.back_edges()) {
    EXPECT_LT(depth_of[be.consumer], depth_of[be.producer]);
    EXPECT_TRUE(pairs.insert({be.consumer, be.producer}).second);
  }
  EXPECT_EQ(MinFeasibleDepth(h), 8);
  // II >= D leaves every loop-carried deadline slack for ASAP.
  ProblemSpec spec;
  spec.formulation = Formulation::kC;
  spec.depth = 8;
  spec.ii = 8;
  spec.resource_cap = 1000;
  Schedule asap{ComputeBounds(h, 8).asap};
  EXPECT_TRUE(CheckFeasible(h, asap, spec).feasible);
  EXPECT_EQ(AugmentBackEdges(g, 0.1, 3, 7), h);
}

TEST(AugmentBackEdgesTest, Errors) {
  const Graph g = GenerateRandomDag(5, 5, 0.01, 8);
  EXPECT_THROW(AugmentBackEdges(g, -1.0, 3, 0), Error);
  EXPECT_THROW(AugmentBackEdges(g, 0.2, 0, 0), Error);
  const Graph lonely(std::vector<Operator>(3), {});
  EXPECT_THROW(AugmentBackEdges(lonely, 1.0, 3, 0), Error);
}

}  // namespace
}  // namespace gsched
