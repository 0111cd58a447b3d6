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

// First-order augmented-Lagrangian scheduler over Gaussian parameters.
//
// Each iteration evaluates the relaxed objective and expected violations,
// takes one Adam step on [mu, log_sigma], and raises every multiplier by
// rho * violation. Every `legalize_every` iterations the means are rounded;
// an illegal rounding is legalized and the parameters are re-centred on the
// legal schedule. The best feasible discrete schedule seen so far is kept,
// which makes the loop an anytime algorithm.

#ifndef GSCHED_OPTIMIZER_H_
#define GSCHED_OPTIMIZER_H_

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gsched/graph.h"
#include "gsched/optimizer_config.h"
#include "gsched/relax.h"
#include "gsched/schedule.h"

namespace gsched {

// mu = warm_start when given, else (asap + alap) / 2;
// sigma = max(sigma_min, kappa * (alap - asap)).
GaussianParams InitParams(const Graph& graph, const ProblemSpec& spec,
                          const OptimizerConfig& cfg,
                          const std::optional<Schedule>& warm_start = {});

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  int t = 0;

  explicit AdamState(int size = 0) : m(size, 0.0), v(size, 0.0) {}
  int size() const { return static_cast<int>(m.size()); }
};

// One bias-corrected Adam update on [mu, log_sigma]. Throws Error naming the
// parameter when the gradient is not finite.
void AdamStep(GaussianParams& params, std::span<const double> gradient,
              AdamState& state, const OptimizerConfig& cfg);

// lambda_c += rho * V_c for every constraint.
Multipliers AlmUpdate(const Multipliers& mult,
                      std::span<const double> violations, double rho);

// s_i = clamp(floor(mu_i + 0.5), 0, depth - 1).
Schedule RoundSchedule(const GaussianParams& params, int depth);

struct TracePoint {
  int iter = 0;
  double wall_ms = 0.0;
  double total_loss = 0.0;
  double loss_obj = 0.0;
  double v_dep = 0.0;
  double v_rec = 0.0;
  double v_res = 0.0;
  double rounded_obj = 0.0;
  bool feasible = false;  // rounding was feasible before legalization
  std::optional<double> best_obj;
};

enum class OptimizeStatus { kFeasible, kInfeasibleUnderLimits };

struct OptimizeResult {
  OptimizeStatus status = OptimizeStatus::kInfeasibleUnderLimits;
  std::optional<Schedule> best_schedule;
  double best_objective = 0.0;
  FeasibilityReport last_report;  // of the last checked rounding
  std::vector<TracePoint> trace;
  int iterations = 0;
  double wall_time = 0.0;  // seconds
  int num_trainable = 0;   // scalars under optimization (2|V|)
  bool converged = false;

  bool feasible() const { return status == OptimizeStatus::kFeasible; }
};

// Runs the optimization loop. The graph must be sink-augmented for the memory
// formulations. Never throws for an over-constrained Formulation C instance;
// the result then has status kInfeasibleUnderLimits.
OptimizeResult Optimize(const Graph& graph, const ProblemSpec& spec,
                        const OptimizerConfig& cfg,
                        const std::optional<Schedule>& warm_start = {});

// Header `iter,wall_ms,total_loss,loss_obj,v_dep,v_rec,v_res,rounded_obj,
// feasible,best_obj`, floats with 9 significant digits, `inf` for no best.
void WriteTraceCsv(std::ostream& out, std::span<const TracePoint> trace);
std::string FormatNumber(double value);

}  // namespace gsched

#endif  // GSCHED_OPTIMIZER_H_
