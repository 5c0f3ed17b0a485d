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

#ifndef WMBOUND_SAMPLER_H_
#define WMBOUND_SAMPLER_H_

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "wmbound/detector.h"
#include "wmbound/distribution.h"
#include "wmbound/numeric.h"
#include "wmbound/optimal.h"

namespace wmbound {

struct SamplerStats {
  std::uint64_t proposals = 0;
  std::uint64_t acceptances = 0;

  double rate() const {
    return proposals == 0 ? 0.0
                          : static_cast<double>(acceptances) /
                                static_cast<double>(proposals);
  }
  SamplerStats& operator+=(const SamplerStats& other) {
    proposals += other.proposals;
    acceptances += other.acceptances;
    return *this;
  }
};

nlohmann::json StatsToJson(const SamplerStats& stats);

// Two-rate acceptance sampling: propose x ~ F, accept detected proposals
// outright and undetected ones with probability w0/w1. Accepted draws follow
// G* exactly. A uniform variate is consumed only on the undetected branch.
class RejectionSampler {
 public:
  static constexpr std::uint64_t kDefaultMaxProposals = 10'000'000;

  explicit RejectionSampler(WatermarkPlan plan,
                            std::uint64_t max_proposals = kDefaultMaxProposals);

  const WatermarkPlan& plan() const { return plan_; }
  double accept_ratio() const { return accept_ratio_; }
  const SamplerStats& stats() const { return stats_; }

  // Throws kBudgetExceeded if one draw needs more than max_proposals
  // proposals.
  StateId Sample(Rng& rng);

 private:
  WatermarkPlan plan_;
  double accept_ratio_;
  std::uint64_t max_proposals_;
  SamplerStats stats_;
};

// Long-run acceptances per proposal, alpha / (1 - beta) = 1 / w1.
double ExpectedAcceptance(const WatermarkPlan& plan);

// Best-of-m baseline: draw m candidates from F and keep the best one under
// the total order (score descending, id ascending).
struct BestOfMConfig {
  int m = 1;
  ScoreFunction score;
};

class BestOfMSampler {
 public:
  BestOfMSampler(FiniteDistribution base, BestOfMConfig config);

  StateId Sample(Rng& rng) const;

 private:
  FiniteDistribution base_;
  int m_;
  std::vector<std::size_t> rank_;  // by id; 0 is the best state
};

// Exact law of the best-of-m output: P(x) = C(x)^m - C^-(x)^m, where C is the
// F-CDF accumulated from the worst-ranked state up to and including x.
FiniteDistribution BestOfMExactLaw(const FiniteDistribution& base,
                                   const BestOfMConfig& config);

}  // namespace wmbound

#endif  // WMBOUND_SAMPLER_H_
