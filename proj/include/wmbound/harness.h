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

#ifndef WMBOUND_HARNESS_H_
#define WMBOUND_HARNESS_H_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "wmbound/detector.h"
#include "wmbound/distribution.h"
#include "wmbound/divergence.h"
#include "wmbound/policy.h"

namespace wmbound {

enum class GeneratorKind { kExact, kRejection, kRl, kBestOfM };

GeneratorKind ParseGeneratorKind(std::string_view name);
std::string_view GeneratorKindName(GeneratorKind kind);

// Default grids used when the caller gives none.
std::vector<double> DefaultTauQuantileLevels();  // 0.50, 0.55, ..., 0.95
std::vector<double> DefaultBetas();              // 0.05, 0.10, ..., 0.40

struct SweepConfig {
  std::vector<double> taus;
  std::vector<double> betas;
  std::uint64_t n_samples = 100000;
  std::uint64_t seed = 0;
  std::string divergence = "kl";
  GeneratorKind generator = GeneratorKind::kExact;
  int m = 4;                  // best-of-m only
  int bootstrap_resamples = 50;
  TrainConfig train;          // rl only
  std::uint64_t max_proposals = 10'000'000;
};

// One (tau, beta) grid point. For best-of-m and rl the bound is evaluated at
// achieved_beta, the generator's own miss rate; otherwise it uses the
// requested beta.
struct SweepRecord {
  double tau = 0.0;
  double beta = 0.0;
  double alpha = 0.0;
  double achieved_beta = 0.0;
  double empirical_divergence = 0.0;  // bias-corrected when sampled
  double plugin_divergence = 0.0;     // raw plug-in value when sampled
  double bound = 0.0;
  double gap = 0.0;
  double allowance = 0.0;  // 3 bootstrap standard errors; 0 for exact laws
  bool feasible = false;
  std::string note;
};

// Emits one record per grid point in (tau, beta) order. Points with
// alpha(tau) = 0 or alpha(tau) >= 1 - beta are flagged infeasible; errors at
// a point are recorded in its note.
std::vector<SweepRecord> RunSweep(const FiniteDistribution& base,
                                  const ScoreFunction& score,
                                  const SweepConfig& config);

// Plug-in divergence of the empirical law of `counts` against `base`, with
// the bootstrap bias estimate and standard error over `resamples` multinomial
// resamples. corrected = value - bias.
struct PlugInEstimate {
  double value = 0.0;
  double bias = 0.0;
  double corrected = 0.0;
  double standard_error = 0.0;
};
PlugInEstimate PlugInDivergence(const std::vector<std::uint64_t>& counts,
                                const FiniteDistribution& base,
                                const FGenerator& f, int resamples, Rng& rng);

void WriteSweepCsv(std::ostream& out, const std::vector<SweepRecord>& records);
nlohmann::json SweepToJson(const std::vector<SweepRecord>& records);

// Random categorical table with `rows` rows of `columns` cells drawn from
// small alphabets; deterministic for a seed.
std::string SyntheticCsv(std::size_t rows, std::size_t columns,
                         std::uint64_t seed);

// Shortest decimal text that reads back to the same double.
std::string FormatDouble(double v);

// Entry point of the command-line tool.
int RunCli(int argc, const char* const* argv);

}  // namespace wmbound

#endif  // WMBOUND_HARNESS_H_
