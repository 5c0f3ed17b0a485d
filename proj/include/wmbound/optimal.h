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

#ifndef WMBOUND_OPTIMAL_H_
#define WMBOUND_OPTIMAL_H_

#include <memory>

#include "json.hpp"
#include "wmbound/detector.h"
#include "wmbound/distribution.h"
#include "wmbound/divergence.h"

namespace wmbound {

// Everything the optimal watermarked distribution, the two-rate sampler and
// the RL reward are derived from: the base F, the detection region S, the
// achieved alpha = F(S), the target beta and the two density-ratio levels
//   w1 = (1 - beta) / alpha  on S,   w0 = beta / (1 - alpha)  off S.
class WatermarkPlan {
 public:
  const FiniteDistribution& base() const { return *base_; }
  const StateSet& region() const { return region_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double w1() const { return w1_; }
  double w0() const { return w0_; }
  ErrorRates rates() const { return ErrorRates{alpha_, beta_}; }

 private:
  friend WatermarkPlan BuildPlan(const FiniteDistribution&, StateSet, double);

  WatermarkPlan(std::shared_ptr<const FiniteDistribution> base, StateSet region,
                double alpha, double beta, double w1, double w0)
      : base_(std::move(base)),
        region_(std::move(region)),
        alpha_(alpha),
        beta_(beta),
        w1_(w1),
        w0_(w0) {}

  std::shared_ptr<const FiniteDistribution> base_;
  StateSet region_;
  double alpha_;
  double beta_;
  double w1_;
  double w0_;
};

// Errors: kUndetectable when F(S) = 0, kDegenerate when F(S) = 1,
// kInfeasible when F(S) > 1 - beta.
WatermarkPlan BuildPlan(const FiniteDistribution& base, StateSet region,
                        double beta);
WatermarkPlan BuildPlan(const FiniteDistribution& base,
                        const ThresholdDetector& detector, double beta);

// G*(x) = w1 F(x) on S, w0 F(x) off S. With beta = 0 the states off S carry
// no mass and drop out of the support.
FiniteDistribution OptimalDistribution(const WatermarkPlan& plan);

// dG*/dF at a state of the base support.
double DensityRatio(const WatermarkPlan& plan, StateId id);

struct Attainment {
  double achieved = 0.0;  // D_f(G* || F)
  double bound = 0.0;     // closed-form lower bound at (alpha, beta)
  double gap = 0.0;       // achieved - bound
};

Attainment VerifyAttainment(const WatermarkPlan& plan, const FGenerator& f);

// {alpha, beta, w1, w0, region_ids, seedless}
nlohmann::json PlanToJson(const WatermarkPlan& plan);

}  // namespace wmbound

#endif  // WMBOUND_OPTIMAL_H_
