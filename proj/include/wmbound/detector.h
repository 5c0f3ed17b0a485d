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

#ifndef WMBOUND_DETECTOR_H_
#define WMBOUND_DETECTOR_H_

#include <istream>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wmbound/distribution.h"

namespace wmbound {

// Keyed hash of a state's payload mapped to [0, 1) with 53-bit resolution
// (HMAC-SHA256, top 53 bits of the first eight digest bytes).
double HashScore(std::string_view key, const State& x);

// A deterministic real-valued score on states. Either a keyed hash of the
// payload, usable on any support, or an explicit table bound to one support.
class ScoreFunction {
 public:
  static ScoreFunction KeyedHash(std::string key);
  static ScoreFunction Table(SupportPtr universe, std::vector<double> scores);

  bool is_table() const { return table_ != nullptr; }

  // Throws kCoverage when a table does not cover `x`.
  double Score(const State& x) const;

  // Scores of every state of `universe`, indexed by id.
  std::vector<double> ScoresFor(const SupportPtr& universe) const;

 private:
  struct TableData {
    SupportPtr universe;
    std::vector<double> scores;
  };

  std::string key_;
  std::shared_ptr<const TableData> table_;
};

// Reads `state_id,score` or `payload_sha256,score` rows (optional header)
// covering every state of `support`'s universe. A payload hash row scores all
// states with that payload.
ScoreFunction LoadScores(std::istream& source, const FiniteDistribution& support);
ScoreFunction LoadScoresFile(const std::string& path,
                             const FiniteDistribution& support);

// D(x) = 1{ s(x) >= tau }.
class ThresholdDetector {
 public:
  ThresholdDetector(ScoreFunction score, double tau)
      : score_(std::move(score)), tau_(tau) {}

  const ScoreFunction& score() const { return score_; }
  double tau() const { return tau_; }

  bool Detect(const State& x) const { return score_.Score(x) >= tau_; }

  StateSet Region(const FiniteDistribution& support) const;

 private:
  ScoreFunction score_;
  double tau_;
};

StateSet RegionFromScores(const SupportPtr& universe,
                          std::span<const double> scores, double tau);

struct CalibrationRecord {
  double tau = 0.0;
  double achieved_alpha = 0.0;
};

// alpha(tau) = F({s >= tau}) for every tau, sorted by tau.
std::vector<CalibrationRecord> Calibrate(const FiniteDistribution& base,
                                         const ScoreFunction& score,
                                         std::vector<double> taus);

// Score quantiles under the base distribution: for each level q returns the
// smallest score value v with F(s <= v) >= q.
std::vector<double> ScoreQuantiles(const FiniteDistribution& base,
                                   const ScoreFunction& score,
                                   std::span<const double> levels);

}  // namespace wmbound

#endif  // WMBOUND_DETECTOR_H_
