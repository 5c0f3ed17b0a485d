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

#ifndef WMBOUND_TESTS_TEST_UTIL_H_
#define WMBOUND_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <vector>

#include "wmbound/distribution.h"
#include "wmbound/numeric.h"

namespace wmbound::testing {

// Random instance generators for property tests. Every generator takes the
// caller's Rng so failures reproduce from the test's seed.

inline std::size_t UniformIndex(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(UniformDouble(rng) *
                                       static_cast<double>(hi - lo + 1));
}

// F with masses proportional to U(lo, hi) on K fresh states.
inline FiniteDistribution RandomDistribution(Rng& rng, std::size_t k,
                                             double lo = 0.05, double hi = 1.0) {
  std::vector<double> w(k);
  for (double& x : w) x = lo + (hi - lo) * UniformDouble(rng);
  return FiniteDistribution::FromWeights(Support::Indexed(k), std::move(w));
}

// Random weights on an existing universe; each state is zeroed with
// probability `drop` (at least one state keeps mass).
inline FiniteDistribution RandomOn(Rng& rng, const SupportPtr& universe,
                                   double drop = 0.0) {
  std::vector<double> w(universe->size());
  for (double& x : w) x = UniformDouble(rng) < drop ? 0.0 : UniformDouble(rng);
  w[UniformIndex(rng, 0, w.size() - 1)] += 0.5;
  return FiniteDistribution::FromWeights(universe, std::move(w));
}

// A random subset that is neither empty nor full (requires K >= 2).
inline StateSet RandomProperSubset(Rng& rng, const SupportPtr& universe,
                                   double p = 0.3) {
  const std::size_t k = universe->size();
  std::vector<bool> m(k);
  for (std::size_t i = 0; i < k; ++i) m[i] = UniformDouble(rng) < p;
  m[UniformIndex(rng, 0, k - 1)] = true;
  std::size_t off = UniformIndex(rng, 0, k - 1);
  if (std::count(m.begin(), m.end(), true) == static_cast<long>(k)) m[off] = false;
  return StateSet(universe, std::move(m));
}

// G with G(S) >= 1 - beta: mass q >= 1 - beta spread randomly on S, the rest
// randomly off S. G << F holds because F has full support.
inline FiniteDistribution RandomFeasibleG(Rng& rng, const SupportPtr& universe,
                                          const StateSet& region, double beta) {
  const double q = (1.0 - beta) + beta * UniformDouble(rng);
  std::vector<double> in(universe->size(), 0.0), out(universe->size(), 0.0);
  double in_total = 0.0, out_total = 0.0;
  for (std::size_t i = 0; i < universe->size(); ++i) {
    const double w = 0.01 + UniformDouble(rng);
    if (region.contains(static_cast<StateId>(i))) {
      in[i] = w;
      in_total += w;
    } else {
      out[i] = w;
      out_total += w;
    }
  }
  std::vector<double> g(universe->size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = in_total > 0 && in[i] > 0 ? q * in[i] / in_total
                                      : (out_total > 0 ? (1 - q) * out[i] / out_total : 0);
  }
  return FiniteDistribution::FromWeights(universe, std::move(g));
}

}  // namespace wmbound::testing

#endif  // WMBOUND_TESTS_TEST_UTIL_H_
