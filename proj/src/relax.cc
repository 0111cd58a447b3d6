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

#include "gsched/relax.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gsched {

namespace {

double Softplus(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Smallest softplus value used when a target sigma sits on the floor.
constexpr double kSoftplusFloor = 1e-9;

void CheckHasSuccessors(const Graph& graph) {
  for (NodeId id = 0; id < graph.num_nodes(); ++id) {
    if (graph.op(id).bits > 0 && graph.succs(id).empty()) {
      throw Error("node " + std::to_string(id) +
                  " has storage but no successor; add a sink (AddSink) before "
                  "evaluating memory");
    }
  }
}

}  // namespace

double NormalCdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double NormalPdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

GaussianParams::GaussianParams(std::vector<double> mean,
                               const std::vector<double>& sigma,
                               double sigma_floor)
    : mu(std::move(mean)), sigma_min(sigma_floor) {
  if (sigma.size() != mu.size()) {
    throw Error("mean and sigma vectors differ in length");
  }
  log_sigma.reserve(sigma.size());
  for (double s : sigma) log_sigma.push_back(LogSigmaFor(s, sigma_min));
}

double GaussianParams::sigma(NodeId id) const {
  return sigma_min + Softplus(log_sigma[id]);
}

double GaussianParams::sigma_slope(NodeId id) const {
  return Sigmoid(log_sigma[id]);
}

double GaussianParams::LogSigmaFor(double sigma, double sigma_min) {
  const double y = std::max(sigma - sigma_min, kSoftplusFloor);
  // log(expm1(y)) written to stay finite for large y.
  return y + std::log(-std::expm1(-y));
}

StepDistribution::StepDistribution(const GaussianParams& params, int depth)
    : num_nodes_(params.num_nodes()), depth_(depth) {
  if (depth < 1) throw Error("depth must be >= 1");
  const size_t edges = static_cast<size_t>(num_nodes_) * (depth_ - 1);
  cdf_.resize(edges);
  pdf_.resize(edges);
  z_.resize(edges);
  for (NodeId id = 0; id < num_nodes_; ++id) {
    const double mu = params.mu[id];
    const double sigma = params.sigma(id);
    for (int d = 0; d + 1 < depth_; ++d) {
      const double z = (d + 0.5 - mu) / sigma;
      const int k = Index(id, d);
      z_[k] = z;
      cdf_[k] = NormalCdf(z);
      pdf_[k] = NormalPdf(z);
    }
  }
}

double StepDistribution::Cdf(NodeId id, int d) const {
  if (d < 0) return 0.0;
  if (d >= depth_ - 1) return 1.0;
  return cdf_[Index(id, d)];
}

double StepDistribution::Prob(NodeId id, int d) const {
  return Cdf(id, d) - Cdf(id, d - 1);
}

DistributionGrad::DistributionGrad(const StepDistribution& dist)
    : dist_(dist),
      adj_(static_cast<size_t>(dist.num_nodes()) * (dist.depth() - 1), 0.0) {}

void DistributionGrad::AddCdf(NodeId id, int d, double g) {
  if (d < 0 || d >= dist_.depth() - 1) return;
  adj_[static_cast<size_t>(id) * (dist_.depth() - 1) + d] += g;
}

void DistributionGrad::AddProb(NodeId id, int d, double g) {
  AddCdf(id, d, g);
  AddCdf(id, d - 1, -g);
}

std::vector<double> DistributionGrad::ToParamGradient(
    const GaussianParams& params) const {
  const int n = dist_.num_nodes();
  const int edges = dist_.depth() - 1;
  std::vector<double> grad(2 * static_cast<size_t>(n), 0.0);
  for (NodeId id = 0; id < n; ++id) {
    const double sigma = params.sigma(id);
    double d_mu = 0.0;
    double d_sigma = 0.0;
    for (int d = 0; d < edges; ++d) {
      const double a = adj_[static_cast<size_t>(id) * edges + d];
      if (a == 0.0) continue;
      const double density = dist_.EdgeDensity(id, d);
      d_mu -= a * density / sigma;
      d_sigma -= a * density * dist_.EdgeZ(id, d) / sigma;
    }
    grad[id] = d_mu;
    grad[n + id] = d_sigma * params.sigma_slope(id);
  }
  return grad;
}

double StepProb(const GaussianParams& params, NodeId id, int d, int depth) {
  const double mu = params.mu[id];
  const double sigma = params.sigma(id);
  const double upper = d >= depth - 1 ? 1.0 : NormalCdf((d + 0.5 - mu) / sigma);
  const double lower = d <= 0 ? 0.0 : NormalCdf((d - 0.5 - mu) / sigma);
  return upper - lower;
}

double StepCdf(const GaussianParams& params, NodeId id, int d, int depth) {
  if (d < 0) return 0.0;
  if (d >= depth - 1) return 1.0;
  return NormalCdf((d + 0.5 - params.mu[id]) / params.sigma(id));
}

double ExpectedDepViolation(const Graph& graph, const StepDistribution& dist,
                            DepMargin margin, DistributionGrad* grad,
                            double scale) {
  const int depth = dist.depth();
  double total = 0.0;
  for (const Edge& e : graph.edges()) {
    const int offset =
        margin == DepMargin::kLatency ? graph.op(e.producer).latency : 0;
    for (int d = 0; d < depth; ++d) {
      const double p = dist.Prob(e.producer, d);
      const double c = dist.Cdf(e.consumer, d - 1 + offset);
      total += p * c;
      if (grad) {
        grad->AddProb(e.producer, d, scale * c);
        grad->AddCdf(e.consumer, d - 1 + offset, scale * p);
      }
    }
  }
  return total;
}

double ExpectedComm(const Graph& graph, const StepDistribution& dist,
                    DistributionGrad* grad, double scale) {
  const int depth = dist.depth();
  std::vector<double> suffix0(depth + 1), suffix1(depth + 1);
  double total = 0.0;
  for (const Edge& e : graph.edges()) {
    const NodeId i = e.producer;
    const NodeId j = e.consumer;
    suffix0[depth] = suffix1[depth] = 0.0;
    for (int d = depth - 1; d >= 0; --d) {
      const double pj = dist.Prob(j, d);
      suffix0[d] = suffix0[d + 1] + pj;
      suffix1[d] = suffix1[d + 1] + d * pj;
    }
    // E[(X_j - X_i)^+] restricted to d_j >= d_i.
    double prefix0 = 0.0, prefix1 = 0.0;
    for (int d = 0; d < depth; ++d) {
      const double pi = dist.Prob(i, d);
      const double tail = suffix1[d] - d * suffix0[d];
      total += pi * tail;
      if (grad) {
        grad->AddProb(i, d, scale * tail);
        prefix0 += pi;
        prefix1 += d * pi;
        grad->AddProb(j, d, scale * (d * prefix0 - prefix1));
      }
    }
  }
  return total;
}

double ExpectedRecViolation(const Graph& graph, const StepDistribution& dist,
                            int ii, RecMargin margin, DistributionGrad* grad,
                            double scale) {
  const int depth = dist.depth();
  double total = 0.0;
  for (const BackEdge& be : graph.back_edges()) {
    const int offset =
        margin == RecMargin::kStrict ? graph.op(be.producer).latency : 0;
    const int shift = be.distance * ii - offset;
    for (int d = 0; d < depth; ++d) {
      const double p = dist.Prob(be.consumer, d);
      const double late = 1.0 - dist.Cdf(be.producer, d + shift);
      total += p * late;
      if (grad) {
        grad->AddProb(be.consumer, d, scale * late);
        grad->AddCdf(be.producer, d + shift, -scale * p);
      }
    }
  }
  return total;
}

std::vector<double> ExpectedResourceProfile(const Graph& graph,
                                            const StepDistribution& dist) {
  std::vector<double> profile(dist.depth(), 0.0);
  for (NodeId id = 0; id < graph.num_nodes(); ++id) {
    const int r = graph.op(id).resource;
    if (r == 0) continue;
    for (int d = 0; d < dist.depth(); ++d) profile[d] += r * dist.Prob(id, d);
  }
  return profile;
}

void BackpropResourceProfile(const Graph& graph, std::span<const double> adj,
                             DistributionGrad& grad) {
  for (NodeId id = 0; id < graph.num_nodes(); ++id) {
    const int r = graph.op(id).resource;
    if (r == 0) continue;
    for (size_t d = 0; d < adj.size(); ++d) {
      grad.AddProb(id, static_cast<int>(d), r * adj[d]);
    }
  }
}

std::vector<double> ExpectedMemoryProfile(const Graph& graph,
                                          const StepDistribution& dist) {
  CheckHasSuccessors(graph);
  std::vector<double> profile(dist.depth(), 0.0);
  for (NodeId id = 0; id < graph.num_nodes(); ++id) {
    const int bits = graph.op(id).bits;
    if (bits == 0) continue;
    // The last step contributes nothing: every CDF is 1 there.
    for (int d = 0; d + 1 < dist.depth(); ++d) {
      double all_started = 1.0;
      for (NodeId j : graph.succs(id)) all_started *= dist.Cdf(j, d);
      profile[d] += bits * dist.Cdf(id, d) * (1.0 - all_started);
    }
  }
  return profile;
}

void BackpropMemoryProfile(const Graph& graph, const StepDistribution& dist,
                           std::span<const double> adj,
                           DistributionGrad& grad) {
  CheckHasSuccessors(graph);
  std::vector<double> prefix, suffix;
  for (NodeId id = 0; id < graph.num_nodes(); ++id) {
    const int bits = graph.op(id).bits;
    if (bits == 0) continue;
    const auto& succs = graph.succs(id);
    const size_t m = succs.size();
    prefix.assign(m + 1, 1.0);
    suffix.assign(m + 1, 1.0);
    for (int d = 0; d + 1 < dist.depth(); ++d) {
      const double a = adj[d];
      if (a == 0.0) continue;
      for (size_t k = 0; k < m; ++k) {
        prefix[k + 1] = prefix[k] * dist.Cdf(succs[k], d);
      }
      for (size_t k = m; k > 0; --k) {
        suffix[k - 1] = suffix[k] * dist.Cdf(succs[k - 1], d);
      }
      const double started = dist.Cdf(id, d);
      grad.AddCdf(id, d, a * bits * (1.0 - prefix[m]));
      for (size_t k = 0; k < m; ++k) {
        grad.AddCdf(succs[k], d, -a * bits * started * prefix[k] * suffix[k + 1]);
      }
    }
  }
}

std::vector<double> WrapProfile(std::span<const double> linear, int ii) {
  if (ii < 1) throw Error("initiation interval must be >= 1");
  std::vector<double> wrapped(ii, 0.0);
  for (size_t d = 0; d < linear.size(); ++d) wrapped[d % ii] += linear[d];
  return wrapped;
}

std::vector<double> UnwrapAdjoint(std::span<const double> wrapped_adj,
                                  int depth, int ii) {
  std::vector<double> adj(depth);
  for (int d = 0; d < depth; ++d) adj[d] = wrapped_adj[d % ii];
  return adj;
}

std::vector<double> ExpectedModuloResourceProfile(const Graph& graph,
                                                  const StepDistribution& dist,
                                                  int ii) {
  return WrapProfile(ExpectedResourceProfile(graph, dist), ii);
}

std::vector<double> ExpectedModuloMemoryProfile(const Graph& graph,
                                                const StepDistribution& dist,
                                                int ii) {
  return WrapProfile(ExpectedMemoryProfile(graph, dist), ii);
}

double SmoothMax(std::span<const double> profile, double tau,
                 std::vector<double>* weights) {
  if (profile.empty()) throw Error("smooth max of an empty profile");
  if (!(tau > 0)) throw Error("temperature must be positive");
  const double peak = *std::max_element(profile.begin(), profile.end());
  double sum = 0.0;
  for (double x : profile) sum += std::exp((x - peak) / tau);
  if (weights) {
    weights->resize(profile.size());
    for (size_t d = 0; d < profile.size(); ++d) {
      (*weights)[d] = std::exp((profile[d] - peak) / tau) / sum;
    }
  }
  return peak + tau * std::log(sum);
}

double ExcessViolation(std::span<const double> profile, double cap,
                       std::vector<double>* slope) {
  double total = 0.0;
  if (slope) slope->assign(profile.size(), 0.0);
  for (size_t d = 0; d < profile.size(); ++d) {
    if (profile[d] > cap) {
      total += profile[d] - cap;
      if (slope) (*slope)[d] = 1.0;
    }
  }
  return total;
}

std::string_view ConstraintName(Constraint c) {
  switch (c) {
    case Constraint::kDep:
      return "dep";
    case Constraint::kRec:
      return "rec";
    case Constraint::kRes:
      return "res";
  }
  return "?";
}

std::array<bool, kNumConstraints> ActiveConstraints(const ProblemSpec& spec) {
  return {true, spec.is_modulo(), spec.is_modulo()};
}

std::vector<LossTerm> EvaluateTerms(const Graph& graph,
                                    const GaussianParams& params,
                                    const ProblemSpec& spec,
                                    const RelaxConfig& cfg,
                                    bool with_gradient) {
  if (params.num_nodes() != graph.num_nodes()) {
    throw Error("parameter vector size does not match the graph");
  }
  const StepDistribution dist(params, spec.depth);
  std::vector<LossTerm> terms;

  auto finish = [&](std::string_view name, double value,
                    const DistributionGrad& g) {
    LossTerm term{name, value, {}};
    if (with_gradient) term.gradient = g.ToParamGradient(params);
    terms.push_back(std::move(term));
  };

  {
    DistributionGrad g(dist);
    std::vector<double> weights;
    double value = 0.0;
    switch (spec.formulation) {
      case Formulation::kA: {
        const auto profile = ExpectedResourceProfile(graph, dist);
        value = SmoothMax(profile, cfg.tau, with_gradient ? &weights : nullptr);
        if (with_gradient) BackpropResourceProfile(graph, weights, g);
        if (spec.alpha != 0.0) {
          value += spec.alpha * ExpectedComm(graph, dist,
                                             with_gradient ? &g : nullptr,
                                             spec.alpha);
        }
        break;
      }
      case Formulation::kB: {
        const auto profile = ExpectedMemoryProfile(graph, dist);
        value = SmoothMax(profile, cfg.tau, with_gradient ? &weights : nullptr);
        if (with_gradient) BackpropMemoryProfile(graph, dist, weights, g);
        break;
      }
      case Formulation::kC: {
        const auto wrapped =
            WrapProfile(ExpectedMemoryProfile(graph, dist), spec.ii);
        value = SmoothMax(wrapped, cfg.tau, with_gradient ? &weights : nullptr);
        if (with_gradient) {
          BackpropMemoryProfile(graph, dist,
                                UnwrapAdjoint(weights, spec.depth, spec.ii), g);
        }
        break;
      }
    }
    finish("objective", value, g);
  }

  {
    DistributionGrad g(dist);
    const double v = ExpectedDepViolation(graph, dist, spec.dep_margin,
                                          with_gradient ? &g : nullptr);
    finish("dep", v, g);
  }

  if (spec.is_modulo()) {
    {
      DistributionGrad g(dist);
      const double v =
          ExpectedRecViolation(graph, dist, spec.ii, spec.rec_margin,
                               with_gradient ? &g : nullptr);
      finish("rec", v, g);
    }
    {
      DistributionGrad g(dist);
      const auto wrapped =
          WrapProfile(ExpectedResourceProfile(graph, dist), spec.ii);
      std::vector<double> slope;
      const double cap = spec.resource_cap.value_or(0);
      const double v = ExcessViolation(wrapped, cap, &slope);
      if (with_gradient) {
        BackpropResourceProfile(graph,
                                UnwrapAdjoint(slope, spec.depth, spec.ii), g);
      }
      finish("res", v, g);
    }
  }
  return terms;
}

LossBreakdown TotalLoss(const Graph& graph, const GaussianParams& params,
                        const ProblemSpec& spec, const Multipliers& mult,
                        const RelaxConfig& cfg) {
  const std::vector<LossTerm> terms =
      EvaluateTerms(graph, params, spec, cfg, /*with_gradient=*/true);
  LossBreakdown out;
  out.gradient.assign(params.num_trainable(), 0.0);

  auto check_finite = [](const LossTerm& term) {
    bool ok = std::isfinite(term.value);
    for (double g : term.gradient) ok = ok && std::isfinite(g);
    if (!ok) {
      throw Error("non-finite value or gradient in loss term '" +
                  std::string(term.name) + "'");
    }
  };

  for (const LossTerm& term : terms) {
    check_finite(term);
    double weight = 1.0;
    if (term.name == "objective") {
      out.objective = term.value;
      out.total += term.value;
    } else {
      Constraint c = term.name == "dep"   ? Constraint::kDep
                     : term.name == "rec" ? Constraint::kRec
                                          : Constraint::kRes;
      const double v = term.value;
      out.violations[static_cast<int>(c)] = v;
      out.total += mult[c] * v + 0.5 * mult.rho * v * v;
      weight = mult[c] + mult.rho * v;
    }
    for (size_t k = 0; k < out.gradient.size(); ++k) {
      out.gradient[k] += weight * term.gradient[k];
    }
  }
  return out;
}

}  // namespace gsched
