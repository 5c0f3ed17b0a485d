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

#include "wmbound/sampler.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wmbound/status.h"

namespace wmbound {
namespace {

// States of `base`'s support sorted from best to worst.
std::vector<StateId> RankOrder(const FiniteDistribution& base,
                               const ScoreFunction& score) {
  const auto scores = score.ScoresFor(base.universe_ptr());
  std::vector<StateId> order(base.support().begin(), base.support().end());
  std::sort(order.begin(), order.end(), [&](StateId a, StateId b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  return order;
}

void CheckM(int m) {
  if (m < 1) throw Error(ErrorCode::kDomain, "best-of-m requires m >= 1");
}

}  // namespace

nlohmann::json StatsToJson(const SamplerStats& stats) {
  return {{"proposals", stats.proposals},
          {"acceptances", stats.acceptances},
          {"rate", stats.rate()}};
}

RejectionSampler::RejectionSampler(WatermarkPlan plan,
                                   std::uint64_t max_proposals)
    : plan_(std::move(plan)),
      accept_ratio_(plan_.w0() / plan_.w1()),
      max_proposals_(max_proposals) {
  if (max_proposals_ == 0) {
    throw Error(ErrorCode::kDomain, "proposal budget must be positive");
  }
}

StateId RejectionSampler::Sample(Rng& rng) {
  const FiniteDistribution& base = plan_.base();
  const StateSet& region = plan_.region();
  for (std::uint64_t attempt = 0; attempt < max_proposals_; ++attempt) {
    const StateId x = base.Sample(rng);
    ++stats_.proposals;
    if (region.contains(x) || UniformDouble(rng) < accept_ratio_) {
      ++stats_.acceptances;
      return x;
    }
  }
  throw Error(ErrorCode::kBudgetExceeded,
              "rejection sampler exceeded " + std::to_string(max_proposals_) +
                  " proposals for one draw (alpha=" +
                  std::to_string(plan_.alpha()) +
                  ", beta=" + std::to_string(plan_.beta()) + ")");
}

double ExpectedAcceptance(const WatermarkPlan& plan) { return 1.0 / plan.w1(); }

BestOfMSampler::BestOfMSampler(FiniteDistribution base, BestOfMConfig config)
    : base_(std::move(base)), m_(config.m) {
  CheckM(m_);
  rank_.assign(base_.universe().size(), 0);
  const auto order = RankOrder(base_, config.score);
  for (std::size_t r = 0; r < order.size(); ++r) rank_[order[r]] = r;
}

StateId BestOfMSampler::Sample(Rng& rng) const {
  StateId best = base_.Sample(rng);
  for (int i = 1; i < m_; ++i) {
    const StateId x = base_.Sample(rng);
    if (rank_[x] < rank_[best]) best = x;
  }
  return best;
}

FiniteDistribution BestOfMExactLaw(const FiniteDistribution& base,
                                   const BestOfMConfig& config) {
  CheckM(config.m);
  const auto order = RankOrder(base, config.score);
  std::vector<double> masses(base.universe().size(), 0.0);
  CompensatedSum below;
  double previous_power = 0.0;
  // Walk from the worst state upward; the best state closes the CDF at 1.
  for (std::size_t i = order.size(); i-- > 0;) {
    const StateId x = order[i];
    below.Add(base.mass(x));
    const double cdf = i == 0 ? 1.0 : std::min(below.value(), 1.0);
    const double power = std::pow(cdf, config.m);
    masses[x] = power - previous_power;
    previous_power = power;
  }
  return FiniteDistribution::FromMasses(base.universe_ptr(), std::move(masses));
}

}  // namespace wmbound
