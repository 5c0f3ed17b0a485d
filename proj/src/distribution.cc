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

#include "wmbound/distribution.h"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "wmbound/status.h"

namespace wmbound {
namespace {

constexpr double kNormalizationTol = 1e-12;
constexpr char kCellSeparator = '\x1f';

std::string_view Trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

std::shared_ptr<const Support> Support::FromPayloads(
    std::vector<std::string> payloads) {
  if (payloads.size() > std::numeric_limits<StateId>::max()) {
    throw Error(ErrorCode::kDomain, "support too large");
  }
  auto support = std::shared_ptr<Support>(new Support());
  support->states_.reserve(payloads.size());
  for (std::size_t i = 0; i < payloads.size(); ++i) {
    const auto id = static_cast<StateId>(i);
    support->by_payload_[payloads[i]].push_back(id);
    support->states_.push_back(State{id, std::move(payloads[i])});
  }
  return support;
}

std::shared_ptr<const Support> Support::Indexed(std::size_t size) {
  std::vector<std::string> payloads(size);
  for (std::size_t i = 0; i < size; ++i) payloads[i] = "s" + std::to_string(i);
  return FromPayloads(std::move(payloads));
}

const State& Support::state(StateId id) const {
  if (id >= states_.size()) {
    throw Error(ErrorCode::kDomain,
                "state id " + std::to_string(id) + " outside support of size " +
                    std::to_string(states_.size()));
  }
  return states_[id];
}

std::span<const StateId> Support::Find(std::string_view payload) const {
  auto it = by_payload_.find(std::string(payload));
  if (it == by_payload_.end()) return {};
  return it->second;
}

std::string PayloadSha256(std::string_view payload) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(payload.data(), payload.size(), digest, &len, EVP_sha256(),
             nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(2 * len, '0');
  for (unsigned int i = 0; i < len; ++i) {
    out[2 * i] = kHex[digest[i] >> 4];
    out[2 * i + 1] = kHex[digest[i] & 0xF];
  }
  return out;
}

FiniteDistribution::FiniteDistribution(SupportPtr universe,
                                       std::vector<double> masses)
    : universe_(std::move(universe)), mass_(std::move(masses)) {
  log_mass_.resize(mass_.size());
  CompensatedSum running;
  for (std::size_t i = 0; i < mass_.size(); ++i) {
    log_mass_[i] = std::log(mass_[i]);
    if (mass_[i] > 0) {
      support_.push_back(static_cast<StateId>(i));
      running.Add(mass_[i]);
      cdf_.push_back(running.value());
    }
  }
}

FiniteDistribution FiniteDistribution::FromMasses(SupportPtr universe,
                                                  std::vector<double> masses) {
  if (!universe) throw Error(ErrorCode::kDomain, "null support");
  if (masses.size() != universe->size()) {
    throw Error(ErrorCode::kDomain, "mass vector size " +
                                        std::to_string(masses.size()) +
                                        " != support size " +
                                        std::to_string(universe->size()));
  }
  for (double m : masses) {
    if (!(m >= 0.0) || !std::isfinite(m)) {
      throw Error(ErrorCode::kDomain, "masses must be finite and nonnegative");
    }
  }
  const double total = Sum(masses);
  if (std::abs(total - 1.0) > kNormalizationTol) {
    throw Error(ErrorCode::kDomain,
                "masses sum to " + std::to_string(total) + ", not 1");
  }
  return FiniteDistribution(std::move(universe), std::move(masses));
}

FiniteDistribution FiniteDistribution::FromWeights(SupportPtr universe,
                                                   std::vector<double> weights) {
  if (!universe) throw Error(ErrorCode::kDomain, "null support");
  if (weights.size() != universe->size()) {
    throw Error(ErrorCode::kDomain, "weight vector size mismatch");
  }
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kDomain, "weights must be finite and nonnegative");
    }
  }
  const double total = Sum(weights);
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw Error(ErrorCode::kDomain, "weights have no positive finite total");
  }
  for (double& w : weights) w /= total;
  return FiniteDistribution(std::move(universe), std::move(weights));
}

FiniteDistribution FiniteDistribution::Uniform(SupportPtr universe) {
  if (!universe || universe->size() == 0) {
    throw Error(ErrorCode::kDomain, "uniform distribution needs a state");
  }
  const std::size_t k = universe->size();
  return FiniteDistribution(std::move(universe),
                            std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

double FiniteDistribution::mass(StateId id) const {
  if (id >= mass_.size()) {
    throw Error(ErrorCode::kDomain, "state id " + std::to_string(id) +
                                        " outside the distribution's universe");
  }
  return mass_[id];
}

double FiniteDistribution::log_mass(StateId id) const {
  if (id >= log_mass_.size()) {
    throw Error(ErrorCode::kDomain, "state id " + std::to_string(id) +
                                        " outside the distribution's universe");
  }
  return log_mass_[id];
}

StateId FiniteDistribution::Sample(Rng& rng) const {
  // Scale by the last cumulative value so rounding in the CDF never leaves a
  // gap at the top.
  const double u = UniformDouble(rng) * cdf_.back();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return support_[static_cast<std::size_t>(it - cdf_.begin())];
}

StateSet::StateSet(SupportPtr universe, std::vector<bool> membership)
    : universe_(std::move(universe)), membership_(std::move(membership)) {
  if (!universe_ || membership_.size() != universe_->size()) {
    throw Error(ErrorCode::kDomain, "state set does not match its support");
  }
}

StateSet StateSet::Empty(SupportPtr universe) {
  const std::size_t k = universe->size();
  return StateSet(std::move(universe), std::vector<bool>(k, false));
}

StateSet StateSet::Full(SupportPtr universe) {
  const std::size_t k = universe->size();
  return StateSet(std::move(universe), std::vector<bool>(k, true));
}

StateSet StateSet::Of(SupportPtr universe, std::span<const StateId> ids) {
  std::vector<bool> membership(universe->size(), false);
  for (StateId id : ids) {
    if (id >= membership.size()) {
      throw Error(ErrorCode::kDomain,
                  "state id " + std::to_string(id) + " outside support");
    }
    membership[id] = true;
  }
  return StateSet(std::move(universe), std::move(membership));
}

std::size_t StateSet::count() const {
  return static_cast<std::size_t>(
      std::count(membership_.begin(), membership_.end(), true));
}

std::vector<StateId> StateSet::ids() const {
  std::vector<StateId> out;
  for (std::size_t i = 0; i < membership_.size(); ++i) {
    if (membership_[i]) out.push_back(static_cast<StateId>(i));
  }
  return out;
}

StateSet StateSet::Complement() const {
  std::vector<bool> flipped(membership_.size());
  for (std::size_t i = 0; i < membership_.size(); ++i) {
    flipped[i] = !membership_[i];
  }
  return StateSet(universe_, std::move(flipped));
}

StateSet StateSet::Union(const StateSet& other) const {
  if (universe_ != other.universe_) {
    throw Error(ErrorCode::kDomain, "union of sets from different supports");
  }
  std::vector<bool> joined(membership_.size());
  for (std::size_t i = 0; i < membership_.size(); ++i) {
    joined[i] = membership_[i] || other.membership_[i];
  }
  return StateSet(universe_, std::move(joined));
}

bool StateSet::Disjoint(const StateSet& other) const {
  if (universe_ != other.universe_) return true;
  for (std::size_t i = 0; i < membership_.size(); ++i) {
    if (membership_[i] && other.membership_[i]) return false;
  }
  return true;
}

double MassOf(const FiniteDistribution& dist, const StateSet& set) {
  if (dist.universe_ptr() != set.universe_ptr()) {
    throw Error(ErrorCode::kDomain,
                "state set belongs to a different support than the "
                "distribution");
  }
  CompensatedSum total;
  for (StateId id : dist.support()) {
    if (set.contains(id)) total.Add(dist.mass(id));
  }
  return std::clamp(total.value(), 0.0, 1.0);
}

std::vector<std::string> SplitCsvLine(std::string_view line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delimiter) {
      cells.emplace_back(Trim(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  if (quoted) throw Error(ErrorCode::kParse, "unterminated quoted cell");
  cells.emplace_back(Trim(cell));
  return cells;
}

FiniteDistribution IngestCsv(std::istream& source, const CsvOptions& options) {
  std::vector<std::string> rows;
  std::size_t columns = 0;
  std::size_t line_no = 0;
  bool header_pending = options.has_header;
  std::string line;
  while (std::getline(source, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    std::vector<std::string> cells;
    try {
      cells = SplitCsvLine(line, options.delimiter);
    } catch (const Error& e) {
      throw Error(ErrorCode::kParse,
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (columns == 0) {
      columns = cells.size();
    } else if (cells.size() != columns) {
      throw Error(ErrorCode::kParse,
                  "line " + std::to_string(line_no) + ": expected " +
                      std::to_string(columns) + " columns, found " +
                      std::to_string(cells.size()));
    }
    if (header_pending) {
      header_pending = false;
      continue;
    }
    std::string payload;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c > 0) payload.push_back(kCellSeparator);
      payload += cells[c];
    }
    rows.push_back(std::move(payload));
  }
  if (rows.empty()) throw Error(ErrorCode::kParse, "no data rows in input");

  const double n = static_cast<double>(rows.size());
  if (!options.dedupe) {
    const std::size_t k = rows.size();
    return FiniteDistribution::FromMasses(Support::FromPayloads(std::move(rows)),
                                          std::vector<double>(k, 1.0 / n));
  }
  // First-occurrence order keeps ids stable for a given file.
  std::vector<std::string> distinct;
  std::vector<double> counts;
  std::unordered_map<std::string, std::size_t> index;
  for (auto& row : rows) {
    auto [it, inserted] = index.try_emplace(row, distinct.size());
    if (inserted) {
      distinct.push_back(row);
      counts.push_back(0.0);
    }
    counts[it->second] += 1.0;
  }
  for (double& c : counts) c /= n;
  return FiniteDistribution::FromMasses(Support::FromPayloads(std::move(distinct)),
                                        std::move(counts));
}

FiniteDistribution IngestCsvFile(const std::string& path,
                                 const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, "cannot open " + path);
  return IngestCsv(in, options);
}

nlohmann::json DistributionToJson(const FiniteDistribution& dist) {
  nlohmann::json out = nlohmann::json::array();
  for (StateId id : dist.support()) {
    out.push_back({{"id", id},
                   {"payload_hash", PayloadSha256(dist.universe().state(id).payload)},
                   {"mass", dist.mass(id)}});
  }
  return out;
}

double TotalVariation(const FiniteDistribution& p, const FiniteDistribution& q) {
  if (!p.SharesUniverseWith(q)) {
    throw Error(ErrorCode::kDomain, "total variation across different supports");
  }
  CompensatedSum total;
  const auto pm = p.dense_masses();
  const auto qm = q.dense_masses();
  for (std::size_t i = 0; i < pm.size(); ++i) total.Add(std::abs(pm[i] - qm[i]));
  return 0.5 * total.value();
}

}  // namespace wmbound
