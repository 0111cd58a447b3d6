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

#ifndef GSCHED_OPTIMIZER_CONFIG_H_
#define GSCHED_OPTIMIZER_CONFIG_H_

#include <cstdint>
#include <limits>

#include "gsched/relax.h"

namespace gsched {

enum class InitMode { kMidpoint, kListSchedule };

struct OptimizerConfig {
  double lr = 1e-2;
  double rho = 1e-4;
  double tau = 1e-2;
  double kappa = 1.0 / 6.0;
  double lambda_init = 1e-6;
  double sigma_min = kDefaultSigmaMin;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int max_iters = 5000;
  double time_limit = std::numeric_limits<double>::infinity();  // seconds
  int legalize_every = 50;
  // Stop once the best objective and every mean have been still for this many
  // iterations (mean movement below `converge_tol`). 0 disables the test.
  int converge_window = 200;
  double converge_tol = 1e-4;
  InitMode init = InitMode::kMidpoint;
  // Half-width of the uniform perturbation added to the initial means of a
  // cold start. Midpoints of odd-slack windows sit exactly on a rounding
  // boundary, and nodes with identical windows otherwise move in lockstep.
  double init_jitter = 0.25;
  uint64_t seed = 0;

  // Throws Error on non-positive rates, windows or temperatures.
  void Validate() const;
};

}  // namespace gsched

#endif  // GSCHED_OPTIMIZER_CONFIG_H_
