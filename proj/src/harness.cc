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

#include "wmbound/harness.h"

#include <charconv>
#include <cmath>
#include <random>

#include "wmbound/optimal.h"
#include "wmbound/sampler.h"
#include "wmbound/status.h"

namespace wmbound {
namespace {

std::string CsvQuote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<double> Grid(double first, double step, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    // Round to 1e-12 so grid values print as the decimals they stand for.
    out.push_back(std::round((first + step * i) * 1e12) / 1e12);
  }
  return out;
}

// Draws a multinomial(n, p) count vector by sequential conditional binomials.
std::vector<std::uint64_t> Multinomial(std::uint64_t n,
                                       const FiniteDistribution& p, Rng& rng) {
  std::vector<std::uint64_t> counts(p.universe().size(), 0);
  std::uint64_t remaining = n;
  double remaining_mass = 1.0;
  const auto ids = p.support();
  for (std::size_t i = 0; i < ids.size() && remaining > 0; ++i) {
    const double m = p.mass(ids[i]);
    if (i + 1 == ids.size() || m >= remaining_mass) {
      counts[ids[i]] = remaining;
      break;
    }
    std::binomial_distribution<std::uint64_t> draw(remaining, m / remaining_mass);
    const std::uint64_t c = draw(rng);
    counts[ids[i]] = c;
    remaining -= c;
    remaining_mass -= m;
  }
  return counts;
}

FiniteDistribution EmpiricalLaw(const std::vector<std::uint64_t>& counts,
                                const SupportPtr& universe) {
  std::vector<double> weights(counts.begin(), counts.end());
  return FiniteDistribution::FromWeights(universe, std::move(weights));
}

}  // namespace

GeneratorKind ParseGeneratorKind(std::string_view name) {
  if (name == "exact") return GeneratorKind::kExact;
  if (name == "rejection") return GeneratorKind::kRejection;
  if (name == "rl") return GeneratorKind::kRl;
  if (name == "best-of-m" || name == "best_of_m") return GeneratorKind::kBestOfM;
  throw Error(ErrorCode::kDomain,
              "unknown generator '" + std::string(name) +
                  "' (exact, rejection, rl, best-of-m)");
}

std::string_view GeneratorKindName(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::kExact: return "exact";
    case GeneratorKind::kRejection: return "rejection";
    case GeneratorKind::kRl: return "rl";
    case GeneratorKind::kBestOfM: return "best-of-m";
  }
  return "exact";
}

std::vector<double> DefaultTauQuantileLevels() { return Grid(0.5, 0.05, 10); }

std::vector<double> DefaultBetas() { return Grid(0.05, 0.05, 8); }

PlugInEstimate PlugInDivergence(const std::vector<std::uint64_t>& counts,
                                const FiniteDistribution& base,
                                const FGenerator& f, int resamples, Rng& rng) {
  std::uint64_t n = 0;
  for (auto c : counts) n += c;
  if (n == 0) throw Error(ErrorCode::kDomain, "no samples to estimate from");
  const FiniteDistribution empirical = EmpiricalLaw(counts, base.universe_ptr());
  PlugInEstimate out;
  out.value = FDivergence(empirical, base, f);
  if (resamples > 1) {
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(resamples));
    for (int r = 0; r < resamples; ++r) {
      values.push_back(FDivergence(
          EmpiricalLaw(Multinomial(n, empirical, rng), base.universe_ptr()), base,
          f));
    }
    const double mean = Sum(values) / static_cast<double>(values.size());
    CompensatedSum ss;
    for (double v : values) ss.Add((v - mean) * (v - mean));
    out.standard_error = std::sqrt(ss.value() / static_cast<double>(values.size() - 1));
    out.bias = mean - out.value;
  }
  out.corrected = out.value - out.bias;
  return out;
}

std::vector<SweepRecord> RunSweep(const FiniteDistribution& base,
                                  const ScoreFunction& score,
                                  const SweepConfig& config) {
  const FGenerator f = FGenerator::ByName(config.divergence);
  std::vector<double> taus = config.taus;
  if (taus.empty()) {
    const auto levels = DefaultTauQuantileLevels();
    taus = ScoreQuantiles(base, score, levels);
  }
  const std::vector<double> betas =
      config.betas.empty() ? DefaultBetas() : config.betas;
  const auto scores = score.ScoresFor(base.universe_ptr());

  std::vector<SweepRecord> records;
  std::uint64_t index = 0;
  for (double tau : taus) {
    const StateSet region = RegionFromScores(base.universe_ptr(), scores, tau);
    const double alpha = MassOf(base, region);
    for (double beta : betas) {
      SweepRecord rec;
      rec.tau = tau;
      rec.beta = beta;
      rec.alpha = alpha;
      Rng rng(MixSeed(config.seed ^ index++));
      rec.feasible = alpha > 0.0 && alpha < 1.0 - beta;
      if (!rec.feasible) {
        rec.note = alpha <= 0.0 ? "infeasible: empty detection region"
                                : "infeasible: alpha >= 1 - beta";
        records.push_back(std::move(rec));
        continue;
      }
      try {
        const WatermarkPlan plan = BuildPlan(base, region, beta);
        double bound_beta = beta;
        switch (config.generator) {
          case GeneratorKind::kExact: {
            const auto g = OptimalDistribution(plan);
            rec.empirical_divergence = FDivergence(g, base, f);
            rec.plugin_divergence = rec.empirical_divergence;
            rec.achieved_beta = 1.0 - MassOf(g, region);
            break;
          }
          case GeneratorKind::kRejection: {
            RejectionSampler sampler(plan, config.max_proposals);
            std::vector<std::uint64_t> counts(base.universe().size(), 0);
            std::uint64_t hits = 0;
            for (std::uint64_t i = 0; i < config.n_samples; ++i) {
              const StateId x = sampler.Sample(rng);
              ++counts[x];
              hits += region.contains(x) ? 1 : 0;
            }
            const auto est =
                PlugInDivergence(counts, base, f, config.bootstrap_resamples, rng);
            rec.empirical_divergence = est.corrected;
            rec.plugin_divergence = est.value;
            rec.allowance = 3.0 * est.standard_error;
            rec.achieved_beta =
                1.0 - static_cast<double>(hits) / static_cast<double>(config.n_samples);
            break;
          }
          case GeneratorKind::kRl: {
            auto [policy, report] = Train(base, WatermarkReward(plan), config.train);
            const auto g = policy.Distribution();
            rec.empirical_divergence = FDivergence(g, base, f);
            rec.plugin_divergence = rec.empirical_divergence;
            rec.achieved_beta = 1.0 - MassOf(g, region);
            // Compare at the policy's own miss rate so the optimizer's residual
            // enters the gap at second order only.
            bound_beta = std::clamp(rec.achieved_beta, 0.0, 1.0 - alpha);
            if (!report.converged) {
              rec.note = "not converged after " + std::to_string(report.iterations) +
                         " iterations";
            }
            break;
          }
          case GeneratorKind::kBestOfM: {
            const BestOfMConfig cfg{config.m, score};
            const auto law = BestOfMExactLaw(base, cfg);
            rec.achieved_beta = 1.0 - MassOf(law, region);
            bound_beta = std::clamp(rec.achieved_beta, 0.0, 1.0 - alpha);
            if (config.n_samples > 0) {
              const BestOfMSampler sampler(base, cfg);
              std::vector<std::uint64_t> counts(base.universe().size(), 0);
              for (std::uint64_t i = 0; i < config.n_samples; ++i) {
                ++counts[sampler.Sample(rng)];
              }
              const auto est = PlugInDivergence(counts, base, f,
                                                config.bootstrap_resamples, rng);
              rec.empirical_divergence = est.corrected;
              rec.plugin_divergence = est.value;
              rec.allowance = 3.0 * est.standard_error;
            } else {
              rec.empirical_divergence = FDivergence(law, base, f);
              rec.plugin_divergence = rec.empirical_divergence;
            }
            break;
          }
        }
        rec.bound = LowerBound(f, ErrorRates{alpha, bound_beta}).value();
        rec.gap = rec.empirical_divergence - rec.bound;
      } catch (const Error& e) {
        rec.note = std::string(ErrorCodeName(e.code())) + ": " + e.what();
        rec.empirical_divergence = std::nan("");
        rec.plugin_divergence = std::nan("");
        rec.gap = std::nan("");
      }
      records.push_back(std::move(rec));
    }
  }
  return records;
}

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void WriteSweepCsv(std::ostream& out, const std::vector<SweepRecord>& records) {
  out << "tau,beta,alpha,achieved_beta,empirical_divergence,plugin_divergence,"
         "bound,gap,allowance,feasible,note\n";
  for (const auto& r : records) {
    out << FormatDouble(r.tau) << ',' << FormatDouble(r.beta) << ','
        << FormatDouble(r.alpha) << ',' << FormatDouble(r.achieved_beta) << ','
        << FormatDouble(r.empirical_divergence) << ','
        << FormatDouble(r.plugin_divergence) << ',' << FormatDouble(r.bound)
        << ',' << FormatDouble(r.gap) << ',' << FormatDouble(r.allowance) << ','
        << (r.feasible ? 1 : 0) << ',' << CsvQuote(r.note) << '\n';
  }
}

nlohmann::json SweepToJson(const std::vector<SweepRecord>& records) {
  nlohmann::json out = nlohmann::json::array();
  const auto num = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return FormatDouble(v);
  };
  for (const auto& r : records) {
    out.push_back({{"tau", r.tau},
                   {"beta", r.beta},
                   {"alpha", r.alpha},
                   {"achieved_beta", num(r.achieved_beta)},
                   {"empirical_divergence", num(r.empirical_divergence)},
                   {"plugin_divergence", num(r.plugin_divergence)},
                   {"bound", num(r.bound)},
                   {"gap", num(r.gap)},
                   {"allowance", num(r.allowance)},
                   {"feasible", r.feasible},
                   {"note", r.note}});
  }
  return out;
}

std::string SyntheticCsv(std::size_t rows, std::size_t columns,
                         std::uint64_t seed) {
  Rng rng(MixSeed(seed));
  std::string out = "respondent";
  for (std::size_t c = 0; c < columns; ++c) out += ",q" + std::to_string(c + 1);
  out += '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    out += "r" + std::to_string(r + 1);
    for (std::size_t c = 0; c < columns; ++c) {
      // Answer codes 1..(3 + c % 4), skewed toward low codes.
      const std::uint64_t levels = 3 + c % 4;
      const double u = UniformDouble(rng);
      const auto code = 1 + static_cast<std::uint64_t>(
                                static_cast<double>(levels) * u * u);
      out += ',' + std::to_string(code);
    }
    out += '\n';
  }
  return out;
}

}  // namespace wmbound
