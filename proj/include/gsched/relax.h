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

// Gaussian relaxation of a discrete schedule.
//
// Each operator i gets an independent X_i ~ N(mu_i, sigma_i^2). Rounding X_i
// to the nearest integer step gives the bucket probabilities
//
//   P_i^d = Phi((d + 0.5 - mu_i) / sigma_i) - Phi((d - 0.5 - mu_i) / sigma_i)
//
// with the lower edge of bucket 0 at -inf and the upper edge of bucket D-1 at
// +inf, so that every operator's mass sums to one over [0, D). All objectives
// and constraint violations below are expectations over these buckets, and
// every one of them is differentiable in (mu, log_sigma).
//
// Gradients are propagated in reverse: each term accumulates its adjoint with
// respect to the per-node CDF table C_i(d) = P(round(X_i) <= d) into a
// DistributionGrad, which is then pulled back to the 2|V| parameters through
// dC/dmu = -phi(z)/sigma and dC/dsigma = -phi(z) z/sigma.

#ifndef GSCHED_RELAX_H_
#define GSCHED_RELAX_H_

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "gsched/graph.h"
#include "gsched/schedule.h"

namespace gsched {

inline constexpr double kDefaultSigmaMin = 0.05;

// Standard normal CDF and density.
double NormalCdf(double x);
double NormalPdf(double x);

// sigma_i = sigma_min + softplus(log_sigma_i). The trainable state is the
// concatenation [mu, log_sigma]: exactly 2|V| scalars.
struct GaussianParams {
  std::vector<double> mu;
  std::vector<double> log_sigma;
  double sigma_min = kDefaultSigmaMin;

  GaussianParams() = default;
  GaussianParams(std::vector<double> mean, const std::vector<double>& sigma,
                 double sigma_floor = kDefaultSigmaMin);

  int num_nodes() const { return static_cast<int>(mu.size()); }
  int num_trainable() const {
    return static_cast<int>(mu.size() + log_sigma.size());
  }
  double sigma(NodeId id) const;
  // d sigma / d log_sigma.
  double sigma_slope(NodeId id) const;

  // Inverse of the positive map. Targets at or below the floor saturate a
  // hair above it.
  static double LogSigmaFor(double sigma, double sigma_min);
};

// Rounding probabilities for one parameter vector over D buckets.
class StepDistribution {
 public:
  StepDistribution(const GaussianParams& params, int depth);

  int num_nodes() const { return num_nodes_; }
  int depth() const { return depth_; }

  // P(round(X_i) = d), d in [0, D).
  double Prob(NodeId id, int d) const;
  // P(round(X_i) <= d); 0 for d < 0 and 1 for d >= D-1.
  double Cdf(NodeId id, int d) const;

  // Bucket edge density terms used by the backward pass, d in [0, D-1).
  double EdgeDensity(NodeId id, int d) const { return pdf_[Index(id, d)]; }
  double EdgeZ(NodeId id, int d) const { return z_[Index(id, d)]; }

 private:
  int Index(NodeId id, int d) const { return id * (depth_ - 1) + d; }

  int num_nodes_;
  int depth_;
  // Interior bucket edges only: (D - 1) per node.
  std::vector<double> cdf_;
  std::vector<double> pdf_;
  std::vector<double> z_;
};

// Adjoint accumulator over the CDF table of a StepDistribution.
class DistributionGrad {
 public:
  explicit DistributionGrad(const StepDistribution& dist);

  // Adds g * dL/dC_i(d). Edges outside [0, D-1) are constants and ignored.
  void AddCdf(NodeId id, int d, double g);
  // Adds g * dL/dP_i^d.
  void AddProb(NodeId id, int d, double g);

  // Gradient with respect to [mu, log_sigma].
  std::vector<double> ToParamGradient(const GaussianParams& params) const;

 private:
  const StepDistribution& dist_;
  std::vector<double> adj_;
};

double StepProb(const GaussianParams& params, NodeId id, int d, int depth);
double StepCdf(const GaussianParams& params, NodeId id, int d, int depth);

// Expected number of violated forward edges:
//   sum_{(i,j)} sum_{d_i} P_i^{d_i} C_j(d_i - 1 + offset)
// with offset 0 for chaining and Lat(i) for the latency margin.
// When `grad` is given, accumulates scale * dV into it.
double ExpectedDepViolation(const Graph& graph, const StepDistribution& dist,
                            DepMargin margin, DistributionGrad* grad = nullptr,
                            double scale = 1.0);

// Expected total edge length counting only non-negative lengths:
//   sum_{(i,j)} sum_{d_i} sum_{d_j >= d_i} P_i^{d_i} P_j^{d_j} (d_j - d_i).
double ExpectedComm(const Graph& graph, const StepDistribution& dist,
                    DistributionGrad* grad = nullptr, double scale = 1.0);

// Expected recurrence violations over back-edges (i consumer, j producer):
//   sum_{(i,j,k)} sum_{d_i} P_i^{d_i} (1 - C_j(d_i + k*II - offset))
// where offset = Lat(j) for kStrict and 0 for kStart.
double ExpectedRecViolation(const Graph& graph, const StepDistribution& dist,
                            int ii, RecMargin margin,
                            DistributionGrad* grad = nullptr,
                            double scale = 1.0);

// Res^(d) = sum_i r_i P_i^d.
std::vector<double> ExpectedResourceProfile(const Graph& graph,
                                            const StepDistribution& dist);
void BackpropResourceProfile(const Graph& graph, std::span<const double> adj,
                             DistributionGrad& grad);

// Mem^(d) = sum_i b_i C_i(d) (1 - prod_{j in succ(i)} C_j(d)).
// Requires every node with b_i > 0 to have a successor.
std::vector<double> ExpectedMemoryProfile(const Graph& graph,
                                          const StepDistribution& dist);
void BackpropMemoryProfile(const Graph& graph, const StepDistribution& dist,
                           std::span<const double> adj,
                           DistributionGrad& grad);

// out[t] = sum_k linear[t + k*ii]; the adjoint is the matching gather.
std::vector<double> WrapProfile(std::span<const double> linear, int ii);
std::vector<double> UnwrapAdjoint(std::span<const double> wrapped_adj,
                                  int depth, int ii);

std::vector<double> ExpectedModuloResourceProfile(const Graph& graph,
                                                  const StepDistribution& dist,
                                                  int ii);
std::vector<double> ExpectedModuloMemoryProfile(const Graph& graph,
                                                const StepDistribution& dist,
                                                int ii);

// tau * log sum_d exp(profile[d] / tau), evaluated with a max shift. When
// `weights` is given it receives d smooth_max / d profile (a softmax).
double SmoothMax(std::span<const double> profile, double tau,
                 std::vector<double>* weights = nullptr);

// sum_d max(0, profile[d] - cap). `slope` receives the subgradient (1 above
// the cap, 0 otherwise).
double ExcessViolation(std::span<const double> profile, double cap,
                       std::vector<double>* slope = nullptr);

enum class Constraint { kDep = 0, kRec = 1, kRes = 2 };
inline constexpr int kNumConstraints = 3;
std::string_view ConstraintName(Constraint c);

struct Multipliers {
  std::array<double, kNumConstraints> lambda{};
  double rho = 1e-4;

  double& operator[](Constraint c) { return lambda[static_cast<int>(c)]; }
  double operator[](Constraint c) const { return lambda[static_cast<int>(c)]; }
};

struct RelaxConfig {
  double tau = 1e-2;
};

// Which constraints the relaxed loss carries for a formulation: Dep always,
// Rec and Res for C.
std::array<bool, kNumConstraints> ActiveConstraints(const ProblemSpec& spec);

struct LossTerm {
  std::string_view name;  // "objective", "dep", "rec", "res"
  double value = 0.0;
  std::vector<double> gradient;  // d value / d [mu, log_sigma]
};

// Evaluates the primary objective followed by each active violation term,
// with per-term gradients when `with_gradient` is set.
std::vector<LossTerm> EvaluateTerms(const Graph& graph,
                                    const GaussianParams& params,
                                    const ProblemSpec& spec,
                                    const RelaxConfig& cfg,
                                    bool with_gradient = true);

struct LossBreakdown {
  double objective = 0.0;
  std::array<double, kNumConstraints> violations{};
  double total = 0.0;
  std::vector<double> gradient;  // d total / d [mu, log_sigma]

  double violation(Constraint c) const {
    return violations[static_cast<int>(c)];
  }
};

// total = objective + sum_c (lambda_c V_c + rho/2 V_c^2) over active c.
// Throws Error naming the term if any value or gradient is non-finite.
LossBreakdown TotalLoss(const Graph& graph, const GaussianParams& params,
                        const ProblemSpec& spec, const Multipliers& mult,
                        const RelaxConfig& cfg);

}  // namespace gsched

#endif  // GSCHED_RELAX_H_
