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

#ifndef WMBOUND_DISTRIBUTION_H_
#define WMBOUND_DISTRIBUTION_H_

#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "wmbound/numeric.h"

namespace wmbound {

using StateId = std::uint32_t;

// One element of a finite state space. The payload is the canonical byte
// string the state was built from (for ingested data, the canonical row).
struct State {
  StateId id = 0;
  std::string payload;
};

// The ordered universe of states that distributions, sets and score tables
// index into. Ids are exactly 0..size()-1. Immutable once built.
class Support {
 public:
  static std::shared_ptr<const Support> FromPayloads(
      std::vector<std::string> payloads);
  // States named "s0", "s1", ...; handy for synthetic instances.
  static std::shared_ptr<const Support> Indexed(std::size_t size);

  std::size_t size() const { return states_.size(); }
  const State& state(StateId id) const;
  std::span<const State> states() const { return states_; }

  // All ids whose payload equals `payload` (more than one when rows were
  // ingested without deduplication).
  std::span<const StateId> Find(std::string_view payload) const;

 private:
  Support() = default;

  std::vector<State> states_;
  std::unordered_map<std::string, std::vector<StateId>> by_payload_;
};

using SupportPtr = std::shared_ptr<const Support>;

// Lower-case hex SHA-256 of a payload.
std::string PayloadSha256(std::string_view payload);

// A probability mass function on a Support. Masses are stored densely by id;
// states with zero mass are not part of the distribution's (strict) support.
class FiniteDistribution {
 public:
  // Masses indexed by id. Requires every mass >= 0 and a total within 1e-12
  // of one; masses are used as given.
  static FiniteDistribution FromMasses(SupportPtr universe,
                                       std::vector<double> masses);
  // Nonnegative weights with a positive finite total; normalized here.
  static FiniteDistribution FromWeights(SupportPtr universe,
                                        std::vector<double> weights);
  static FiniteDistribution Uniform(SupportPtr universe);

  const Support& universe() const { return *universe_; }
  const SupportPtr& universe_ptr() const { return universe_; }
  bool SharesUniverseWith(const FiniteDistribution& other) const {
    return universe_ == other.universe_;
  }

  // Ids with positive mass, ascending.
  std::span<const StateId> support() const { return support_; }
  std::span<const double> dense_masses() const { return mass_; }

  double mass(StateId id) const;
  double log_mass(StateId id) const;
  bool InSupport(StateId id) const { return id < mass_.size() && mass_[id] > 0; }

  // Inverse-CDF draw over the strict support.
  StateId Sample(Rng& rng) const;

 private:
  FiniteDistribution(SupportPtr universe, std::vector<double> masses);

  SupportPtr universe_;
  std::vector<double> mass_;
  std::vector<double> log_mass_;
  std::vector<StateId> support_;
  std::vector<double> cdf_;  // parallel to support_
};

// A subset of one Support's ids.
class StateSet {
 public:
  StateSet(SupportPtr universe, std::vector<bool> membership);
  static StateSet Empty(SupportPtr universe);
  static StateSet Full(SupportPtr universe);
  static StateSet Of(SupportPtr universe, std::span<const StateId> ids);

  const SupportPtr& universe_ptr() const { return universe_; }
  bool contains(StateId id) const {
    return id < membership_.size() && membership_[id];
  }
  std::size_t count() const;
  std::vector<StateId> ids() const;

  StateSet Complement() const;
  StateSet Union(const StateSet& other) const;
  bool Disjoint(const StateSet& other) const;

 private:
  SupportPtr universe_;
  std::vector<bool> membership_;
};

// Probability of `set` under `dist`; compensated summation over members.
double MassOf(const FiniteDistribution& dist, const StateSet& set);

struct CsvOptions {
  bool has_header = false;
  bool dedupe = false;
  char delimiter = ',';
};

// Reads delimited rows into an empirical distribution. Cells are trimmed and
// joined with the 0x1F unit separator to form a state's payload. Without
// dedupe every row is its own state of mass 1/N; with dedupe identical rows
// share one state of mass multiplicity/N.
FiniteDistribution IngestCsv(std::istream& source, const CsvOptions& options);
FiniteDistribution IngestCsvFile(const std::string& path,
                                 const CsvOptions& options);

// Splits one line of delimited text, honoring double-quoted cells. Exposed for
// the score-file reader.
std::vector<std::string> SplitCsvLine(std::string_view line, char delimiter);

// [{id, payload_hash, mass}, ...] over the strict support.
nlohmann::json DistributionToJson(const FiniteDistribution& dist);

// Total variation distance between two distributions on one universe.
double TotalVariation(const FiniteDistribution& p, const FiniteDistribution& q);

}  // namespace wmbound

#endif  // WMBOUND_DISTRIBUTION_H_
