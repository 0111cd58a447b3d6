# Copyright 2026 The gsched Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Operator scheduling with a Gaussian relaxation."""

from gsched._core import (
    Error,
    Graph,
    InfeasibleDepthError,
    ParseError,
    ProblemSpec,
    add_sink,
    augment_back_edges,
    baseline,
    check_feasible,
    compute_bounds,
    eval_memory,
    eval_objective,
    eval_resource,
    generate_random_dag,
    legalize_modulo,
    legalize_regular,
    min_feasible_depth,
    optimize,
    oracle,
    parse_graph,
    read_graph,
    step_prob,
    topo_order,
)

__all__ = [
    "Error",
    "Graph",
    "InfeasibleDepthError",
    "ParseError",
    "ProblemSpec",
    "add_sink",
    "augment_back_edges",
    "baseline",
    "check_feasible",
    "compute_bounds",
    "eval_memory",
    "eval_objective",
    "eval_resource",
    "generate_random_dag",
    "legalize_modulo",
    "legalize_regular",
    "min_feasible_depth",
    "optimize",
    "oracle",
    "parse_graph",
    "read_graph",
    "step_prob",
    "topo_order",
]
