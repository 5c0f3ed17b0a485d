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

#include "wmbound/divergence.h"

#include <cmath>
#include <random>

#include "wmbound/numeric.h"
#include "wmbound/status.h"

namespace wmbound {
namespace {

constexpr double kFeasibilityTol = 1e-12;

// x log(x / y) with 0 log 0 = 0.
double XLogXOverY(double x, double y) {
  if (x == 0.0) return 0.0;
  return x * std::log(x / y);
}

}  // namespace

FGenerator FGenerator::KullbackLeibler() {
  return FGenerator(
      Kind::kKullbackLeibler, "kl", [](double t) { return t * std::log(t); },
      0.0, std::numeric_limits<double>::infinity());
}

FGenerator FGenerator::TotalVariation() {
  return FGenerator(
      Kind::kTotalVariation, "tv",
      [](double t) { return 0.5 * std::abs(t - 1.0); }, 0.5, 0.5);
}

FGenerator FGenerator::ChiSquare() {
  return FGenerator(
      Kind::kChiSquare, "chi2", [](double t) { return (t - 1.0) * (t - 1.0); },
      1.0, std::numeric_limits<double>::infinity());
}

FGenerator FGenerator::Custom(std::string name, std::function<double(double)> f,
                              double value_at_zero, double slope_at_infinity) {
  if (!f) throw Error(ErrorCode::kDomain, "custom generator has no function");
  if (!(std::abs(f(1.0)) <= 1e-12)) {
    throw Error(ErrorCode::kDomain, "generator '" + name + "' has f(1) != 0");
  }
  std::mt19937_64 rng(0x5eed);
  for (int i = 0; i < 100; ++i) {
    const double t1 = 10.0 * UniformDouble(rng);
    const double t2 = 10.0 * UniformDouble(rng);
    const double lambda = UniformDouble(rng);
    if (t1 == 0.0 || t2 == 0.0) continue;
    const double lhs = f(lambda * t1 + (1.0 - lambda) * t2);
    const double rhs = lambda * f(t1) + (1.0 - lambda) * f(t2);
    if (!(lhs <= rhs + 1e-9)) {
      throw Error(ErrorCode::kDomain,
                  "generator '" + name + "' failed the convexity spot check");
    }
  }
  return FGenerator(Kind::kCustom, std::move(name), std::move(f), value_at_zero,
                    slope_at_infinity);
}

FGenerator FGenerator::ByName(std::string_view name) {
  if (name == "kl") return KullbackLeibler();
  if (name == "tv") return TotalVariation();
  if (name == "chi2") return ChiSquare();
  throw Error(ErrorCode::kDomain,
              "unknown divergence '" + std::string(name) + "' (kl, tv, chi2)");
}

ErrorRates ErrorRates::Make(double alpha, double beta) {
  if (!(alpha >= 0.0 && alpha <= 1.0 && beta >= 0.0 && beta <= 1.0)) {
    throw Error(ErrorCode::kInfeasible, "error rates must lie in [0, 1]");
  }
  if (alpha > 1.0 - beta + kFeasibilityTol) {
    throw Error(ErrorCode::kInfeasible,
                "infeasible error rates: need alpha <= 1 - beta, got alpha=" +
                    std::to_string(alpha) + " beta=" + std::to_string(beta));
  }
  return ErrorRates{alpha, beta};
}

double BoundValue::value() const {
  if (unbounded_) throw Error(ErrorCode::kDomain, "bound is unbounded");
  return value_;
}

double FDivergence(const FiniteDistribution& g, const FiniteDistribution& f_base,
                   const FGenerator& f) {
  if (!g.SharesUniverseWith(f_base)) {
    throw Error(ErrorCode::kDomain,
                "divergence between distributions on different supports");
  }
  for (StateId id : g.support()) {
    if (!f_base.InSupport(id)) {
      throw Error(ErrorCode::kAbsoluteContinuity,
                  "G puts mass on state " + std::to_string(id) +
                      " outside the support of F");
    }
  }
  CompensatedSum total;
  if (f.kind() == FGenerator::Kind::kKullbackLeibler) {
    for (StateId id : g.support()) {
      total.Add(g.mass(id) * (g.log_mass(id) - f_base.log_mass(id)));
    }
    return total.value();
  }
  for (StateId id : f_base.support()) {
    const double fm = f_base.mass(id);
    const double gm = g.mass(id);
    double ratio = 0.0;
    if (gm > 0.0) {
      ratio = f.kind() == FGenerator::Kind::kCustom
                  ? std::exp(g.log_mass(id) - f_base.log_mass(id))
                  : gm / fm;
    }
    total.Add(fm * f(ratio));
  }
  return total.value();
}

BoundValue LowerBound(const FGenerator& f, const ErrorRates& r) {
  const ErrorRates rates = ErrorRates::Make(r.alpha, r.beta);
  if (rates.alpha >= 1.0) {
    throw Error(ErrorCode::kDomain, "lower bound requires alpha < 1");
  }
  const double tail = (1.0 - rates.alpha) * f(rates.beta / (1.0 - rates.alpha));
  if (rates.alpha == 0.0) {
    // alpha f((1-beta)/alpha) -> (1-beta) lim f(t)/t.
    if (rates.beta == 1.0) return BoundValue::Finite(tail);
    if (std::isinf(f.slope_at_infinity())) return BoundValue::Unbounded();
    return BoundValue::Finite((1.0 - rates.beta) * f.slope_at_infinity() + tail);
  }
  return BoundValue::Finite(rates.alpha * f((1.0 - rates.beta) / rates.alpha) +
                            tail);
}

BoundValue KlLowerBound(const ErrorRates& r) {
  const ErrorRates rates = ErrorRates::Make(r.alpha, r.beta);
  const double a = rates.alpha;
  const double b = rates.beta;
  if (a == 0.0) {
    return b == 1.0 ? BoundValue::Finite(0.0) : BoundValue::Unbounded();
  }
  return BoundValue::Finite(XLogXOverY(1.0 - b, a) + XLogXOverY(b, 1.0 - a));
}

double TvLowerBound(const ErrorRates& r) {
  const ErrorRates rates = ErrorRates::Make(r.alpha, r.beta);
  return 1.0 - rates.alpha - rates.beta;
}

BoundValue ChiSquareLowerBound(const ErrorRates& r) {
  const ErrorRates rates = ErrorRates::Make(r.alpha, r.beta);
  const double a = rates.alpha;
  if (a >= 1.0) throw Error(ErrorCode::kDomain, "chi-square bound requires alpha < 1");
  const double gap = 1.0 - a - rates.beta;
  if (a == 0.0) {
    return rates.beta == 1.0 ? BoundValue::Finite(0.0) : BoundValue::Unbounded();
  }
  return BoundValue::Finite(gap * gap / (a * (1.0 - a)));
}

double CaiBound(const ErrorRates& r) {
  const double s = r.alpha + r.beta;
  if (!(r.alpha >= 0.0 && r.beta >= 0.0 && s > 0.0 && s < 1.0)) {
    throw Error(ErrorCode::kDomain, "prior bound requires 0 < alpha + beta < 1");
  }
  // s(2 - s) = 1 - (1 - s)^2; log1p keeps precision as s -> 1.
  const double gap = 1.0 - s;
  return -std::log1p(-gap * gap);
}

BoundComparison CompareBounds(const ErrorRates& r) {
  if (!(r.alpha > 0.0 && r.beta > 0.0 && r.alpha + r.beta < 1.0)) {
    throw Error(ErrorCode::kDomain,
                "bound comparison requires alpha, beta > 0 and alpha + beta < 1");
  }
  BoundComparison out;
  out.g1 = CaiBound(r);
  out.g2 = KlLowerBound(r).value();
  out.margin = out.g2 - out.g1;
  return out;
}

double BernoulliFDivergence(double a, double q, const FGenerator& f) {
  if (!(a > 0.0 && a < 1.0)) {
    throw Error(ErrorCode::kDomain, "Bernoulli divergence requires 0 < a < 1");
  }
  if (!(q >= 0.0 && q <= 1.0)) {
    throw Error(ErrorCode::kDomain, "Bernoulli divergence requires 0 <= q <= 1");
  }
  return a * f(q / a) + (1.0 - a) * f((1.0 - q) / (1.0 - a));
}

}  // namespace wmbound
