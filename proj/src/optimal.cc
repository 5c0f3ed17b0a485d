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

#include "wmbound/optimal.h"

#include <cmath>

#include "wmbound/status.h"

namespace wmbound {
namespace {

// alpha within this of 1 - beta is treated as the boundary plan G* = F.
constexpr double kBoundaryTol = 1e-12;

}  // namespace

WatermarkPlan BuildPlan(const FiniteDistribution& base, StateSet region,
                        double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw Error(ErrorCode::kInfeasible, "beta must lie in [0, 1]");
  }
  const double alpha = MassOf(base, region);
  if (alpha <= 0.0) {
    throw Error(ErrorCode::kUndetectable,
                "detection region has zero base mass (alpha = 0)");
  }
  if (alpha >= 1.0) {
    throw Error(ErrorCode::kDegenerate,
                "detection region covers the whole base support (alpha = 1)");
  }
  if (alpha > 1.0 - beta + kBoundaryTol) {
    throw Error(ErrorCode::kInfeasible,
                "infeasible plan: alpha <= 1 - beta violated (alpha=" +
                    std::to_string(alpha) + ", 1-beta=" +
                    std::to_string(1.0 - beta) + ")");
  }
  double w1 = (1.0 - beta) / alpha;
  double w0 = beta / (1.0 - alpha);
  if (std::abs(alpha - (1.0 - beta)) <= kBoundaryTol) {
    w1 = 1.0;
    w0 = 1.0;
  }
  return WatermarkPlan(std::make_shared<const FiniteDistribution>(base),
                       std::move(region), alpha, beta, w1, w0);
}

WatermarkPlan BuildPlan(const FiniteDistribution& base,
                        const ThresholdDetector& detector, double beta) {
  return BuildPlan(base, detector.Region(base), beta);
}

FiniteDistribution OptimalDistribution(const WatermarkPlan& plan) {
  const FiniteDistribution& base = plan.base();
  std::vector<double> masses(base.universe().size(), 0.0);
  for (StateId id : base.support()) {
    masses[id] = (plan.region().contains(id) ? plan.w1() : plan.w0()) *
                 base.mass(id);
  }
  return FiniteDistribution::FromMasses(base.universe_ptr(), std::move(masses));
}

double DensityRatio(const WatermarkPlan& plan, StateId id) {
  if (!plan.base().InSupport(id)) {
    throw Error(ErrorCode::kDomain,
                "state " + std::to_string(id) + " is not in the base support");
  }
  return plan.region().contains(id) ? plan.w1() : plan.w0();
}

Attainment VerifyAttainment(const WatermarkPlan& plan, const FGenerator& f) {
  Attainment out;
  out.achieved = FDivergence(OptimalDistribution(plan), plan.base(), f);
  out.bound = LowerBound(f, plan.rates()).value();
  out.gap = out.achieved - out.bound;
  return out;
}

nlohmann::json PlanToJson(const WatermarkPlan& plan) {
  return {{"alpha", plan.alpha()},
          {"beta", plan.beta()},
          {"w1", plan.w1()},
          {"w0", plan.w0()},
          {"region_ids", plan.region().ids()},
          {"seedless", true}};
}

}  // namespace wmbound
