// Copyright 2026 The wmbound Authors.
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

#ifndef WMBOUND_POLICY_H_
#define WMBOUND_POLICY_H_

#include <utility>
#include <vector>

#include "json.hpp"
#include "wmbound/distribution.h"
#include "wmbound/divergence.h"
#include "wmbound/optimal.h"

namespace wmbound {

// A = log((1-beta)(1-alpha) / (alpha beta)). Requires 0 < alpha, beta < 1;
// otherwise kDegenerate (the reward is infinite; use the rejection sampler).
double RewardCoefficient(const ErrorRates& r);

// r(x) = coefficient * 1{x in region} + offset.
struct RewardSpec {
  double coefficient = 0.0;
  StateSet region;
  double offset = 0.0;

  double operator()(StateId id) const {
    return (region.contains(id) ? coefficient : 0.0) + offset;
  }
};

// The reward whose KL-regularized maximizer is the plan's G*.
RewardSpec WatermarkReward(const WatermarkPlan& plan);

// Tabular softmax over the strict support of a base distribution.
class SoftmaxPolicy {
 public:
  // logits[i] belongs to base.support()[i].
  SoftmaxPolicy(const FiniteDistribution& base, std::vector<double> logits);
  // logits = log F.
  static SoftmaxPolicy AtBase(const FiniteDistribution& base);

  std::span<const double> logits() const { return logits_; }
  std::span<const StateId> state_ids() const { return ids_; }
  const SupportPtr& universe_ptr() const { return universe_; }

  // log pi per support position, via log-sum-exp.
  std::vector<double> LogProbabilities() const;
  FiniteDistribution Distribution() const;

  void set_logits(std::vector<double> logits);

 private:
  SupportPtr universe_;
  std::vector<StateId> ids_;
  std::vector<double> logits_;
};

// J(pi) = E_pi[r] - KL(pi || F).
double Objective(const SoftmaxPolicy& pi, const FiniteDistribution& base,
                 const RewardSpec& reward);
double Objective(const FiniteDistribution& pi, const FiniteDistribution& base,
                 const RewardSpec& reward);

// Exact dJ/dlogit_j = pi_j (g_j - J) with g_j = r_j - log(pi_j / F_j).
std::vector<double> ObjectiveGradient(const SoftmaxPolicy& pi,
                                      const FiniteDistribution& base,
                                      const RewardSpec& reward);

// The unique maximizer of J: pi*(x) proportional to F(x) exp(r(x)).
FiniteDistribution GibbsSolution(const FiniteDistribution& base,
                                 const RewardSpec& reward);

struct TrainConfig {
  // <= 0 selects 1 / max_x pi*(x), the inverse of a curvature bound of J.
  double learning_rate = 0.0;
  int max_iters = 5000;
  double tol = 1e-9;
};

struct TrainReport {
  int iterations = 0;
  double final_objective = 0.0;
  double kl_to_target = 0.0;  // KL(pi_hat || Gibbs solution)
  double gradient_norm = 0.0; // sup-norm at exit
  double learning_rate = 0.0; // step actually used
  bool converged = false;
};

// Full-batch gradient ascent on the logits from logits = log F, re-centering
// the logits after every step. Non-convergence is reported, not thrown.
std::pair<SoftmaxPolicy, TrainReport> Train(const FiniteDistribution& base,
                                            const RewardSpec& reward,
                                            const TrainConfig& config);

nlohmann::json PolicyToJson(const SoftmaxPolicy& pi);
nlohmann::json ReportToJson(const TrainReport& report, const TrainConfig& config);

}  // namespace wmbound

#endif  // WMBOUND_POLICY_H_
