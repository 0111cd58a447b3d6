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

#include "gsched/optimizer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include "gsched/baselines.h"
#include "gsched/legalize.h"

namespace gsched {

namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Repairs Dep/Lat (and Rec for C). Returns nothing when the modulo pass
// cannot find a legal schedule from either starting point.
std::optional<Schedule> Legalize(const Graph& graph, const Schedule& s,
                                 const ProblemSpec& spec) {
  if (!spec.is_modulo()) return LegalizeRegular(graph, s, spec.depth);
  std::optional<Schedule> legal;
  // The modulo pass only pushes forward; starting from the clamped regular
  // repair keeps it away from the depth bound.
  for (const Schedule& start : {s, LegalizeRegular(graph, s, spec.depth)}) {
    ModuloLegalization pushed =
        LegalizeModulo(graph, start, spec.depth, spec.ii);
    if (!pushed.ok()) continue;
    ModuloLegalization repaired = RepairModuloResources(
        graph, pushed.schedule, spec.depth, spec.ii, *spec.resource_cap);
    if (repaired.ok()) return std::move(repaired.schedule);
    if (!legal) legal = std::move(pushed.schedule);
  }
  return legal;
}

}  // namespace

void OptimizerConfig::Validate() const {
  if (!(lr > 0)) throw Error("learning rate must be positive");
  if (!(rho >= 0)) throw Error("rho must be non-negative");
  if (!(tau > 0)) throw Error("tau must be positive");
  if (!(kappa >= 0)) throw Error("kappa must be non-negative");
  if (!(sigma_min > 0)) throw Error("sigma_min must be positive");
  if (!(lambda_init >= 0)) throw Error("lambda_init must be non-negative");
  if (max_iters < 0) throw Error("max_iters must be non-negative");
  if (legalize_every < 1) throw Error("legalize_every must be >= 1");
  if (!(init_jitter >= 0)) throw Error("init_jitter must be non-negative");
  if (!(time_limit >= 0)) throw Error("time limit must be non-negative");
}

GaussianParams InitParams(const Graph& graph, const ProblemSpec& spec,
                          const OptimizerConfig& cfg,
                          const std::optional<Schedule>& warm_start) {
  const DepthBounds bounds = ComputeBounds(graph, spec.depth);
  const int n = graph.num_nodes();
  std::vector<double> mu(n), sigma(n);
  if (warm_start && warm_start->size() != n) {
    throw Error("warm start has " + std::to_string(warm_start->size()) +
                " steps but the graph has " + std::to_string(n) + " nodes");
  }
  for (NodeId id = 0; id < n; ++id) {
    mu[id] = warm_start ? (*warm_start)[id]
                        : 0.5 * (bounds.asap[id] + bounds.alap[id]);
    sigma[id] = std::max(cfg.sigma_min, cfg.kappa * bounds.slack(id));
  }
  return GaussianParams(std::move(mu), sigma, cfg.sigma_min);
}

void AdamStep(GaussianParams& params, std::span<const double> gradient,
              AdamState& state, const OptimizerConfig& cfg) {
  const int n = params.num_nodes();
  if (static_cast<int>(gradient.size()) != params.num_trainable() ||
      state.size() != params.num_trainable()) {
    throw Error("Adam state does not match the parameter count");
  }
  for (int k = 0; k < params.num_trainable(); ++k) {
    if (!std::isfinite(gradient[k])) {
      throw Error("non-finite gradient for " +
                  std::string(k < n ? "mu[" : "log_sigma[") +
                  std::to_string(k < n ? k : k - n) + "]");
    }
  }
  ++state.t;
  const double correct1 = 1.0 - std::pow(cfg.adam_beta1, state.t);
  const double correct2 = 1.0 - std::pow(cfg.adam_beta2, state.t);
  for (int k = 0; k < params.num_trainable(); ++k) {
    const double g = gradient[k];
    state.m[k] = cfg.adam_beta1 * state.m[k] + (1.0 - cfg.adam_beta1) * g;
    state.v[k] = cfg.adam_beta2 * state.v[k] + (1.0 - cfg.adam_beta2) * g * g;
    const double step = cfg.lr * (state.m[k] / correct1) /
                        (std::sqrt(state.v[k] / correct2) + cfg.adam_eps);
    double& x = k < n ? params.mu[k] : params.log_sigma[k - n];
    x -= step;
  }
}

Multipliers AlmUpdate(const Multipliers& mult,
                      std::span<const double> violations, double rho) {
  Multipliers out = mult;
  for (size_t c = 0; c < out.lambda.size() && c < violations.size(); ++c) {
    out.lambda[c] += rho * violations[c];
  }
  return out;
}

Schedule RoundSchedule(const GaussianParams& params, int depth) {
  Schedule s;
  s.steps.reserve(params.num_nodes());
  for (double m : params.mu) {
    const double rounded = std::floor(m + 0.5);
    s.steps.push_back(static_cast<int>(
        std::clamp(rounded, 0.0, static_cast<double>(depth - 1))));
  }
  return s;
}

OptimizeResult Optimize(const Graph& graph, const ProblemSpec& spec,
                        const OptimizerConfig& cfg,
                        const std::optional<Schedule>& warm_start) {
  cfg.Validate();
  spec.Validate(graph);
  const Clock::time_point start = Clock::now();

  std::optional<Schedule> init = warm_start;
  if (!init && cfg.init == InitMode::kListSchedule) {
    ScheduleOutcome list = ListSchedule(graph, spec);
    if (list.ok()) init = std::move(list.schedule);
  }
  GaussianParams params = InitParams(graph, spec, cfg, init);
  if (!init && cfg.init_jitter > 0) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> jitter(-cfg.init_jitter,
                                                  cfg.init_jitter);
    for (double& m : params.mu) m += jitter(rng);
  }

  OptimizeResult result;
  result.num_trainable = params.num_trainable();
  AdamState adam(params.num_trainable());
  const auto active = ActiveConstraints(spec);
  Multipliers mult;
  mult.rho = cfg.rho;
  for (int c = 0; c < kNumConstraints; ++c) {
    mult.lambda[c] = active[c] ? cfg.lambda_init : 0.0;
  }
  const RelaxConfig relax{.tau = cfg.tau};

  // Rounds, legalizes if needed, tracks the best schedule and logs a trace
  // point. Returns true when the parameters were re-centred.
  auto checkpoint = [&](int iter, const LossBreakdown& loss) {
    const Schedule rounded = RoundSchedule(params, spec.depth);
    const FeasibilityReport report = CheckFeasible(graph, rounded, spec);
    result.last_report = report;

    TracePoint point;
    point.iter = iter;
    point.total_loss = loss.total;
    point.loss_obj = loss.objective;
    point.v_dep = loss.violation(Constraint::kDep);
    point.v_rec = loss.violation(Constraint::kRec);
    point.v_res = loss.violation(Constraint::kRes);
    point.rounded_obj = EvalObjective(graph, rounded, spec);
    point.feasible = report.feasible;

    std::optional<Schedule> candidate;
    bool reset = false;
    if (report.feasible) {
      candidate = rounded;
    } else {
      if (std::optional<Schedule> legal = Legalize(graph, rounded, spec)) {
        params = ReinitFromSchedule(graph, *legal, cfg, spec.depth);
        adam = AdamState(params.num_trainable());
        reset = true;
        if (CheckFeasible(graph, *legal, spec).feasible) {
          candidate = std::move(legal);
        }
      }
    }
    if (candidate) {
      const double objective = EvalObjective(graph, *candidate, spec);
      if (!result.best_schedule || objective < result.best_objective) {
        result.best_schedule = std::move(candidate);
        result.best_objective = objective;
      }
    }
    if (result.best_schedule) point.best_obj = result.best_objective;
    point.wall_ms = 1e3 * SecondsSince(start);
    result.trace.push_back(point);
    return reset;
  };

  LossBreakdown loss = TotalLoss(graph, params, spec, mult, relax);
  if (checkpoint(0, loss)) loss = TotalLoss(graph, params, spec, mult, relax);

  int iter = 0;
  int last_checkpoint = 0;
  int anchor_iter = 0;
  std::vector<double> anchor_mu = params.mu;
  std::optional<double> anchor_best =
      result.best_schedule ? std::optional(result.best_objective)
                           : std::nullopt;

  while (iter < cfg.max_iters && SecondsSince(start) < cfg.time_limit) {
    ++iter;
    AdamStep(params, loss.gradient, adam, cfg);
    mult = AlmUpdate(mult, loss.violations, cfg.rho);
    loss = TotalLoss(graph, params, spec, mult, relax);
    if (iter % cfg.legalize_every == 0) {
      last_checkpoint = iter;
      if (checkpoint(iter, loss)) {
        loss = TotalLoss(graph, params, spec, mult, relax);
      }
    }

    if (cfg.converge_window > 0 && iter - anchor_iter >= cfg.converge_window) {
      double moved = 0.0;
      for (int k = 0; k < params.num_nodes(); ++k) {
        moved = std::max(moved, std::abs(params.mu[k] - anchor_mu[k]));
      }
      const std::optional<double> best =
          result.best_schedule ? std::optional(result.best_objective)
                               : std::nullopt;
      // Never declare convergence before a feasible schedule exists.
      if (best && best == anchor_best && moved < cfg.converge_tol) {
        result.converged = true;
        break;
      }
      anchor_iter = iter;
      anchor_mu = params.mu;
      anchor_best = best;
    }
  }
  if (last_checkpoint != iter) checkpoint(iter, loss);

  result.iterations = iter;
  result.wall_time = SecondsSince(start);
  result.status = result.best_schedule ? OptimizeStatus::kFeasible
                                       : OptimizeStatus::kInfeasibleUnderLimits;
  return result;
}

std::string FormatNumber(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

void WriteTraceCsv(std::ostream& out, std::span<const TracePoint> trace) {
  out << "iter,wall_ms,total_loss,loss_obj,v_dep,v_rec,v_res,rounded_obj,"
         "feasible,best_obj\n";
  for (const TracePoint& p : trace) {
    out << p.iter << ',' << FormatNumber(p.wall_ms) << ','
        << FormatNumber(p.total_loss) << ',' << FormatNumber(p.loss_obj) << ','
        << FormatNumber(p.v_dep) << ',' << FormatNumber(p.v_rec) << ','
        << FormatNumber(p.v_res) << ',' << FormatNumber(p.rounded_obj) << ','
        << (p.feasible ? 1 : 0) << ','
        << (p.best_obj ? FormatNumber(*p.best_obj) : std::string("inf"))
        << '\n';
  }
}

}  // namespace gsched
