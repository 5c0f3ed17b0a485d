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

#include "wmbound/policy.h"

#include <algorithm>
#include <cmath>

#include "wmbound/numeric.h"
#include "wmbound/status.h"

namespace wmbound {
namespace {

void CheckShared(const SupportPtr& a, const FiniteDistribution& base) {
  if (a != base.universe_ptr()) {
    throw Error(ErrorCode::kDomain, "policy and base live on different supports");
  }
}

void CheckShared(const RewardSpec& reward, const FiniteDistribution& base) {
  if (reward.region.universe_ptr() != base.universe_ptr()) {
    throw Error(ErrorCode::kDomain, "reward and base live on different supports");
  }
}

// J from log pi values over the base support, together with g_j.
double ObjectiveFromLogs(std::span<const StateId> ids,
                         std::span<const double> log_pi,
                         const FiniteDistribution& base,
                         const RewardSpec& reward, std::vector<double>* g) {
  CompensatedSum total;
  if (g) g->resize(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const double gi = reward(ids[i]) - (log_pi[i] - base.log_mass(ids[i]));
    if (g) (*g)[i] = gi;
    const double p = std::exp(log_pi[i]);
    if (p > 0.0) total.Add(p * gi);
  }
  return total.value();
}

}  // namespace

double RewardCoefficient(const ErrorRates& r) {
  if (!(r.alpha > 0.0 && r.alpha < 1.0 && r.beta > 0.0 && r.beta < 1.0)) {
    throw Error(ErrorCode::kDegenerate,
                "reward coefficient is infinite unless 0 < alpha, beta < 1; "
                "use the rejection sampler (embed) for beta = 0");
  }
  return std::log((1.0 - r.beta) * (1.0 - r.alpha) / (r.alpha * r.beta));
}

RewardSpec WatermarkReward(const WatermarkPlan& plan) {
  return RewardSpec{RewardCoefficient(plan.rates()), plan.region(), 0.0};
}

SoftmaxPolicy::SoftmaxPolicy(const FiniteDistribution& base,
                             std::vector<double> logits)
    : universe_(base.universe_ptr()),
      ids_(base.support().begin(), base.support().end()) {
  set_logits(std::move(logits));
}

SoftmaxPolicy SoftmaxPolicy::AtBase(const FiniteDistribution& base) {
  std::vector<double> logits;
  logits.reserve(base.support().size());
  for (StateId id : base.support()) logits.push_back(base.log_mass(id));
  return SoftmaxPolicy(base, std::move(logits));
}

void SoftmaxPolicy::set_logits(std::vector<double> logits) {
  if (logits.size() != ids_.size()) {
    throw Error(ErrorCode::kDomain, "one logit per support state is required");
  }
  for (double v : logits) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNumeric, "non-finite logit");
  }
  logits_ = std::move(logits);
}

std::vector<double> SoftmaxPolicy::LogProbabilities() const {
  const double lse = LogSumExp(logits_);
  std::vector<double> out(logits_.size());
  for (std::size_t i = 0; i < logits_.size(); ++i) out[i] = logits_[i] - lse;
  return out;
}

FiniteDistribution SoftmaxPolicy::Distribution() const {
  const auto log_pi = LogProbabilities();
  std::vector<double> weights(universe_->size(), 0.0);
  for (std::size_t i = 0; i < ids_.size(); ++i) weights[ids_[i]] = std::exp(log_pi[i]);
  return FiniteDistribution::FromWeights(universe_, std::move(weights));
}

double Objective(const SoftmaxPolicy& pi, const FiniteDistribution& base,
                 const RewardSpec& reward) {
  CheckShared(pi.universe_ptr(), base);
  CheckShared(reward, base);
  return ObjectiveFromLogs(pi.state_ids(), pi.LogProbabilities(), base, reward,
                           nullptr);
}

double Objective(const FiniteDistribution& pi, const FiniteDistribution& base,
                 const RewardSpec& reward) {
  CheckShared(pi.universe_ptr(), base);
  CheckShared(reward, base);
  CompensatedSum expected_reward;
  for (StateId id : pi.support()) expected_reward.Add(pi.mass(id) * reward(id));
  return expected_reward.value() -
         FDivergence(pi, base, FGenerator::KullbackLeibler());
}

std::vector<double> ObjectiveGradient(const SoftmaxPolicy& pi,
                                      const FiniteDistribution& base,
                                      const RewardSpec& reward) {
  CheckShared(pi.universe_ptr(), base);
  CheckShared(reward, base);
  const auto log_pi = pi.LogProbabilities();
  std::vector<double> g;
  const double j = ObjectiveFromLogs(pi.state_ids(), log_pi, base, reward, &g);
  std::vector<double> grad(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    grad[i] = std::exp(log_pi[i]) * (g[i] - j);
  }
  return grad;
}

FiniteDistribution GibbsSolution(const FiniteDistribution& base,
                                 const RewardSpec& reward) {
  CheckShared(reward, base);
  const auto ids = base.support();
  std::vector<double> log_weights(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    log_weights[i] = base.log_mass(ids[i]) + reward(ids[i]);
  }
  const double lse = LogSumExp(log_weights);
  if (!std::isfinite(lse)) throw Error(ErrorCode::kNumeric, "Gibbs tilt overflow");
  std::vector<double> weights(base.universe().size(), 0.0);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    weights[ids[i]] = std::exp(log_weights[i] - lse);
  }
  return FiniteDistribution::FromWeights(base.universe_ptr(), std::move(weights));
}

std::pair<SoftmaxPolicy, TrainReport> Train(const FiniteDistribution& base,
                                            const RewardSpec& reward,
                                            const TrainConfig& config) {
  if (!(config.tol > 0.0)) throw Error(ErrorCode::kDomain, "tol must be positive");
  if (config.max_iters < 0) throw Error(ErrorCode::kDomain, "max_iters must be >= 0");
  const FiniteDistribution target = GibbsSolution(base, reward);

  TrainReport report;
  report.learning_rate = config.learning_rate;
  if (!(report.learning_rate > 0.0)) {
    double peak = 0.0;
    for (StateId id : target.support()) peak = std::max(peak, target.mass(id));
    report.learning_rate = 1.0 / peak;
  }

  SoftmaxPolicy pi = SoftmaxPolicy::AtBase(base);
  std::vector<double> logits(pi.logits().begin(), pi.logits().end());
  const auto sup_norm = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };

  auto grad = ObjectiveGradient(pi, base, reward);
  report.gradient_norm = sup_norm(grad);
  while (report.gradient_norm > config.tol && report.iterations < config.max_iters) {
    double mean = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
      logits[i] += report.learning_rate * grad[i];
      mean += logits[i];
    }
    mean /= static_cast<double>(logits.size());
    for (double& v : logits) v -= mean;
    pi.set_logits(logits);
    ++report.iterations;
    grad = ObjectiveGradient(pi, base, reward);
    report.gradient_norm = sup_norm(grad);
    if (!std::isfinite(report.gradient_norm)) {
      throw Error(ErrorCode::kNumeric,
                  "gradient became non-finite at iteration " +
                      std::to_string(report.iterations));
    }
  }
  report.converged = report.gradient_norm <= config.tol;
  report.final_objective = Objective(pi, base, reward);
  if (!std::isfinite(report.final_objective)) {
    throw Error(ErrorCode::kNumeric, "objective is not finite");
  }
  report.kl_to_target = std::max(
      0.0, FDivergence(pi.Distribution(), target, FGenerator::KullbackLeibler()));
  return {std::move(pi), report};
}

nlohmann::json PolicyToJson(const SoftmaxPolicy& pi) {
  return {{"logits", std::vector<double>(pi.logits().begin(), pi.logits().end())},
          {"support_ids",
           std::vector<StateId>(pi.state_ids().begin(), pi.state_ids().end())}};
}

nlohmann::json ReportToJson(const TrainReport& report, const TrainConfig& config) {
  return {{"iterations", report.iterations},
          {"final_objective", report.final_objective},
          {"kl_to_target", report.kl_to_target},
          {"gradient_norm", report.gradient_norm},
          {"learning_rate", report.learning_rate},
          {"converged", report.converged},
          {"config",
           {{"learning_rate", config.learning_rate},
            {"max_iters", config.max_iters},
            {"tol", config.tol}}}};
}

}  // namespace wmbound
