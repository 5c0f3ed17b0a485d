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

#ifndef WMBOUND_DIVERGENCE_H_
#define WMBOUND_DIVERGENCE_H_

#include <functional>
#include <limits>
#include <string>
#include <string_view>

#include "wmbound/distribution.h"

namespace wmbound {

// A convex generator f with f(1) = 0 defining D_f(G||F) = sum F f(G/F).
// value_at_zero is f(0+); slope_at_infinity is lim f(t)/t, used for the
// alpha -> 0 limit of the lower bound.
class FGenerator {
 public:
  enum class Kind { kKullbackLeibler, kTotalVariation, kChiSquare, kCustom };

  static FGenerator KullbackLeibler();
  static FGenerator TotalVariation();
  static FGenerator ChiSquare();
  // Rejects generators with |f(1)| > 1e-12 or that fail a seeded 100-triple
  // convexity spot check on (0, 10).
  static FGenerator Custom(
      std::string name, std::function<double(double)> f, double value_at_zero,
      double slope_at_infinity = std::numeric_limits<double>::infinity());
  // "kl", "tv" or "chi2".
  static FGenerator ByName(std::string_view name);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double value_at_zero() const { return value_at_zero_; }
  double slope_at_infinity() const { return slope_at_infinity_; }

  double operator()(double t) const { return t == 0.0 ? value_at_zero_ : eval_(t); }

 private:
  FGenerator(Kind kind, std::string name, std::function<double(double)> eval,
             double value_at_zero, double slope_at_infinity)
      : kind_(kind),
        name_(std::move(name)),
        eval_(std::move(eval)),
        value_at_zero_(value_at_zero),
        slope_at_infinity_(slope_at_infinity) {}

  Kind kind_;
  std::string name_;
  std::function<double(double)> eval_;
  double value_at_zero_;
  double slope_at_infinity_;
};

// Type I / Type II error levels. Make() enforces 0 <= alpha, 0 <= beta and
// alpha <= 1 - beta (to 1e-12).
struct ErrorRates {
  double alpha = 0.0;
  double beta = 0.0;

  static ErrorRates Make(double alpha, double beta);
};

// Either a finite real or the "unbounded" outcome of a bound at alpha = 0.
class BoundValue {
 public:
  static BoundValue Finite(double v) { return BoundValue(v, false); }
  static BoundValue Unbounded() {
    return BoundValue(std::numeric_limits<double>::infinity(), true);
  }

  bool unbounded() const { return unbounded_; }
  // Throws kDomain when unbounded.
  double value() const;

 private:
  BoundValue(double v, bool unbounded) : value_(v), unbounded_(unbounded) {}
  double value_;
  bool unbounded_;
};

// sum_x F(x) f(G(x)/F(x)). Requires G << F on a shared support; states with
// F(x) > 0 = G(x) contribute F(x) f(0+). The KL generator is evaluated from
// log-mass differences.
double FDivergence(const FiniteDistribution& g, const FiniteDistribution& f_base,
                   const FGenerator& f);

// alpha f((1-beta)/alpha) + (1-alpha) f(beta/(1-alpha)); requires alpha < 1.
BoundValue LowerBound(const FGenerator& f, const ErrorRates& r);

// (1-beta) log((1-beta)/alpha) + beta log(beta/(1-alpha)).
BoundValue KlLowerBound(const ErrorRates& r);
// 1 - alpha - beta.
double TvLowerBound(const ErrorRates& r);
// (1-alpha-beta)^2 / (alpha (1-alpha)); requires alpha < 1.
BoundValue ChiSquareLowerBound(const ErrorRates& r);

// Prior bound -log((alpha+beta)(2-alpha-beta)); requires 0 < alpha+beta < 1.
double CaiBound(const ErrorRates& r);

struct BoundComparison {
  double g1 = 0.0;      // prior bound
  double g2 = 0.0;      // tight KL bound
  double margin = 0.0;  // g2 - g1
};

// Requires alpha, beta > 0 and alpha + beta < 1.
BoundComparison CompareBounds(const ErrorRates& r);

// D_f(Bernoulli(q) || Bernoulli(a)) = a f(q/a) + (1-a) f((1-q)/(1-a)).
double BernoulliFDivergence(double a, double q, const FGenerator& f);

}  // namespace wmbound

#endif  // WMBOUND_DIVERGENCE_H_
