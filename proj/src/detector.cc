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

#include "wmbound/detector.h"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>

#include "wmbound/status.h"

namespace wmbound {
namespace {

bool IsHexDigest(std::string_view s) {
  return s.size() == 64 &&
         std::all_of(s.begin(), s.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

std::optional<std::uint64_t> ParseId(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> ParseScore(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::string ListIds(const std::vector<StateId>& ids) {
  std::string out;
  const std::size_t shown = std::min<std::size_t>(ids.size(), 20);
  for (std::size_t i = 0; i < shown; ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(ids[i]);
  }
  if (ids.size() > shown) {
    out += ", ... (" + std::to_string(ids.size()) + " total)";
  }
  return out;
}

}  // namespace

double HashScore(std::string_view key, const State& x) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()),
       reinterpret_cast<const unsigned char*>(x.payload.data()),
       x.payload.size(), digest, &len);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits = (bits << 8) | digest[i];
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

ScoreFunction ScoreFunction::KeyedHash(std::string key) {
  ScoreFunction s;
  s.key_ = std::move(key);
  return s;
}

ScoreFunction ScoreFunction::Table(SupportPtr universe,
                                   std::vector<double> scores) {
  if (!universe || scores.size() != universe->size()) {
    throw Error(ErrorCode::kCoverage, "score table does not cover the support");
  }
  ScoreFunction s;
  s.table_ = std::make_shared<const TableData>(
      TableData{std::move(universe), std::move(scores)});
  return s;
}

double ScoreFunction::Score(const State& x) const {
  if (!table_) return HashScore(key_, x);
  const auto& states = table_->universe->states();
  if (x.id >= states.size() || states[x.id].payload != x.payload) {
    throw Error(ErrorCode::kCoverage,
                "score table has no entry for state " + std::to_string(x.id));
  }
  return table_->scores[x.id];
}

std::vector<double> ScoreFunction::ScoresFor(const SupportPtr& universe) const {
  if (table_ && table_->universe == universe) return table_->scores;
  std::vector<double> out;
  out.reserve(universe->size());
  for (const State& x : universe->states()) out.push_back(Score(x));
  return out;
}

ScoreFunction LoadScores(std::istream& source, const FiniteDistribution& support) {
  const SupportPtr& universe = support.universe_ptr();
  const std::size_t k = universe->size();
  std::vector<std::optional<double>> scores(k);
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  std::unordered_map<std::string, std::vector<StateId>> by_hash;
  while (std::getline(source, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = SplitCsvLine(line, ',');
    if (first) {
      first = false;
      if (!cells.empty() &&
          (cells[0] == "state_id" || cells[0] == "payload_sha256")) {
        continue;
      }
    }
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (cells.size() != 2) {
      throw Error(ErrorCode::kParse, where + "expected 2 columns");
    }
    const auto score = ParseScore(cells[1]);
    if (!score) throw Error(ErrorCode::kParse, where + "bad score '" + cells[1] + "'");

    std::vector<StateId> targets;
    if (IsHexDigest(cells[0])) {
      // Resolved lazily so files keyed by id never pay for hashing.
      if (by_hash.empty()) {
        for (const State& x : universe->states()) {
          by_hash[PayloadSha256(x.payload)].push_back(x.id);
        }
      }
      auto it = by_hash.find(cells[0]);
      if (it == by_hash.end()) {
        throw Error(ErrorCode::kCoverage,
                    where + "payload hash matches no state: " + cells[0]);
      }
      targets = it->second;
    } else if (auto id = ParseId(cells[0])) {
      if (*id >= k) {
        throw Error(ErrorCode::kCoverage,
                    where + "state id " + cells[0] + " outside support");
      }
      targets.push_back(static_cast<StateId>(*id));
    } else {
      throw Error(ErrorCode::kParse, where + "bad state key '" + cells[0] + "'");
    }
    for (StateId id : targets) {
      if (scores[id]) {
        throw Error(ErrorCode::kConflict,
                    where + "duplicate score for state " + std::to_string(id));
      }
      scores[id] = *score;
    }
  }
  std::vector<StateId> missing;
  std::vector<double> table(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!scores[i]) {
      missing.push_back(static_cast<StateId>(i));
    } else {
      table[i] = *scores[i];
    }
  }
  if (!missing.empty()) {
    throw Error(ErrorCode::kCoverage,
                "score file misses states: " + ListIds(missing));
  }
  return ScoreFunction::Table(universe, std::move(table));
}

ScoreFunction LoadScoresFile(const std::string& path,
                             const FiniteDistribution& support) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, "cannot open " + path);
  return LoadScores(in, support);
}

StateSet RegionFromScores(const SupportPtr& universe,
                          std::span<const double> scores, double tau) {
  std::vector<bool> members(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) members[i] = scores[i] >= tau;
  return StateSet(universe, std::move(members));
}

StateSet ThresholdDetector::Region(const FiniteDistribution& support) const {
  return RegionFromScores(support.universe_ptr(),
                          score_.ScoresFor(support.universe_ptr()), tau_);
}

std::vector<CalibrationRecord> Calibrate(const FiniteDistribution& base,
                                         const ScoreFunction& score,
                                         std::vector<double> taus) {
  std::sort(taus.begin(), taus.end());
  const auto scores = score.ScoresFor(base.universe_ptr());
  std::vector<CalibrationRecord> out;
  out.reserve(taus.size());
  for (double tau : taus) {
    out.push_back(
        {tau, MassOf(base, RegionFromScores(base.universe_ptr(), scores, tau))});
  }
  return out;
}

std::vector<double> ScoreQuantiles(const FiniteDistribution& base,
                                   const ScoreFunction& score,
                                   std::span<const double> levels) {
  const auto scores = score.ScoresFor(base.universe_ptr());
  std::vector<StateId> order(base.support().begin(), base.support().end());
  std::sort(order.begin(), order.end(), [&](StateId a, StateId b) {
    return scores[a] < scores[b] || (scores[a] == scores[b] && a < b);
  });
  std::vector<double> cumulative(order.size());
  CompensatedSum running;
  for (std::size_t i = 0; i < order.size(); ++i) {
    running.Add(base.mass(order[i]));
    cumulative[i] = running.value();
  }
  std::vector<double> out;
  for (double q : levels) {
    auto it = std::lower_bound(cumulative.begin(), cumulative.end(), q);
    if (it == cumulative.end()) --it;
    out.push_back(scores[order[static_cast<std::size_t>(it - cumulative.begin())]]);
  }
  return out;
}

}  // namespace wmbound
