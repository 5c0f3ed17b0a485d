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

// Command-line front end: bound, calibrate, exact, embed, rl, best-of-m,
// sweep, compare-bounds, synth.

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "wmbound/detector.h"
#include "wmbound/distribution.h"
#include "wmbound/divergence.h"
#include "wmbound/harness.h"
#include "wmbound/optimal.h"
#include "wmbound/policy.h"
#include "wmbound/sampler.h"
#include "wmbound/status.h"

namespace wmbound {
namespace {

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "csv";
};

struct DataOptions {
  std::string data;
  bool header = false;
  bool dedupe = false;
  char delimiter = ',';
  std::string scores;
  std::string key = "wmbound";
};

void AddDataOptions(CLI::App* cmd, DataOptions& opts) {
  cmd->add_option("--data", opts.data, "Input CSV; each row is one state")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_flag("--header", opts.header, "First CSV line is a header");
  cmd->add_flag("--dedupe", opts.dedupe, "Aggregate identical rows into one state");
  cmd->add_option("--delimiter", opts.delimiter, "CSV delimiter")
      ->capture_default_str();
  cmd->add_option("--scores", opts.scores,
                  "Score file (state_id,score or payload_sha256,score)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--key", opts.key, "Key of the built-in keyed-hash scorer")
      ->capture_default_str();
}

struct LoadedData {
  FiniteDistribution base;
  ScoreFunction score;
};

LoadedData Load(const DataOptions& opts) {
  CsvOptions csv;
  csv.has_header = opts.header;
  csv.dedupe = opts.dedupe;
  csv.delimiter = opts.delimiter;
  FiniteDistribution base = IngestCsvFile(opts.data, csv);
  ScoreFunction score = opts.scores.empty() ? ScoreFunction::KeyedHash(opts.key)
                                            : LoadScoresFile(opts.scores, base);
  return {std::move(base), std::move(score)};
}

std::string DataMetadata(const DataOptions& opts) {
  std::ostringstream os;
  os << "# data=" << opts.data << "\n# dedupe=" << (opts.dedupe ? 1 : 0)
     << "\n# scores=" << (opts.scores.empty() ? "keyed-hash:" + opts.key : opts.scores)
     << '\n';
  return os.str();
}

// Writes `text` to --out (or stdout).
void Emit(const GlobalOptions& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream file(g.out, std::ios::binary);
  if (!file) throw Error(ErrorCode::kParse, "cannot write " + g.out);
  file << text;
}

void EmitJson(const GlobalOptions& g, const nlohmann::json& j) {
  Emit(g, j.dump(2) + "\n");
}

void WriteSide(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cerr << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::kParse, "cannot write " + path);
  file << text;
}

nlohmann::json BoundJson(double v) {
  if (std::isfinite(v)) return v;
  return FormatDouble(v);
}

std::string RowText(const State& x, char delimiter) {
  std::string row = x.payload;
  for (char& c : row) {
    if (c == '\x1f') c = delimiter;
  }
  return "\"" + row + "\"";
}

}  // namespace

int RunCli(int argc, const char* const* argv) {
  CLI::App app{"Optimal watermark generation under Type I and Type II error "
               "constraints"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--out", g.out, "Output file (default: stdout)");
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  // bound
  double b_alpha = 0, b_beta = 0;
  std::string b_div = "kl";
  auto* bound = app.add_subcommand("bound", "Tight divergence lower bound at (alpha, beta)");
  bound->add_option("--alpha", b_alpha, "False-positive rate")->required();
  bound->add_option("--beta", b_beta, "False-negative rate")->required();
  bound->add_option("--div", b_div, "Divergence")
      ->check(CLI::IsMember({"kl", "tv", "chi2"}))
      ->capture_default_str();

  // calibrate
  DataOptions c_data;
  std::vector<double> c_taus, c_quantiles;
  auto* calibrate = app.add_subcommand("calibrate", "False-positive rate alpha(tau)");
  AddDataOptions(calibrate, c_data);
  calibrate->add_option("--taus", c_taus, "Thresholds")->delimiter(',');
  calibrate->add_option("--quantiles", c_quantiles,
                        "Thresholds as score quantiles under F")
      ->delimiter(',');

  // exact / embed / rl / best-of-m share plan options.
  DataOptions p_data;
  double p_tau = 0.5, p_beta = 0.1;
  std::string p_div = "kl";
  auto* exact = app.add_subcommand("exact", "Optimal watermarked distribution G*");
  auto* embed = app.add_subcommand("embed", "Sample G* by two-rate acceptance sampling");
  auto* rl = app.add_subcommand("rl", "Train a tabular softmax policy towards G*");
  auto* bom = app.add_subcommand("best-of-m", "Best-of-m baseline against the bound");
  for (auto* cmd : {exact, embed, rl, bom}) {
    AddDataOptions(cmd, p_data);
    cmd->add_option("--tau", p_tau, "Detector threshold")->required();
  }
  for (auto* cmd : {exact, embed, rl}) {
    cmd->add_option("--beta", p_beta, "Target false-negative rate")->required();
  }
  for (auto* cmd : {exact, bom}) {
    cmd->add_option("--div", p_div, "Divergence")
        ->check(CLI::IsMember({"kl", "tv", "chi2"}))
        ->capture_default_str();
  }
  std::uint64_t e_n = 1000;
  std::uint64_t e_budget = RejectionSampler::kDefaultMaxProposals;
  std::string e_stats;
  embed->add_option("--n", e_n, "Number of samples")->capture_default_str();
  embed->add_option("--max-proposals", e_budget, "Proposal cap per sample")
      ->capture_default_str();
  embed->add_option("--stats", e_stats, "Stats JSON file (default: stderr)");

  TrainConfig r_cfg;
  std::string r_report;
  rl->add_option("--lr", r_cfg.learning_rate, "Step size (<= 0: automatic)")
      ->capture_default_str();
  rl->add_option("--iters", r_cfg.max_iters, "Iteration cap")->capture_default_str();
  rl->add_option("--tol", r_cfg.tol, "Gradient sup-norm stopping tolerance")->capture_default_str();
  rl->add_option("--report", r_report, "TrainReport JSON file for --format csv");

  int m_m = 4;
  std::uint64_t m_n = 0;
  bom->add_option("--m", m_m, "Candidates per draw")->capture_default_str();
  bom->add_option("--n", m_n, "Monte Carlo draws (0: exact law only)")
      ->capture_default_str();

  // sweep
  DataOptions s_data;
  SweepConfig s_cfg;
  std::vector<double> s_quantiles;
  std::string s_generator = "exact";
  auto* sweep = app.add_subcommand("sweep", "Divergence versus bound over a (tau, beta) grid");
  AddDataOptions(sweep, s_data);
  sweep->add_option("--taus", s_cfg.taus, "Thresholds")->delimiter(',');
  sweep->add_option("--quantiles", s_quantiles,
                    "Thresholds as score quantiles (default 0.5,0.55,...,0.95)")
      ->delimiter(',');
  sweep->add_option("--betas", s_cfg.betas,
                    "Target false-negative rates (default 0.05,0.10,...,0.40)")
      ->delimiter(',');
  sweep->add_option("--n", s_cfg.n_samples, "Samples per grid point")
      ->capture_default_str();
  sweep->add_option("--div", s_cfg.divergence, "Divergence")
      ->check(CLI::IsMember({"kl", "tv", "chi2"}))
      ->capture_default_str();
  sweep->add_option("--generator", s_generator, "Watermarked generator")
      ->check(CLI::IsMember({"exact", "rejection", "rl", "best-of-m"}))
      ->capture_default_str();
  sweep->add_option("--m", s_cfg.m, "Candidates per draw for best-of-m")->capture_default_str();
  sweep->add_option("--bootstrap", s_cfg.bootstrap_resamples,
                    "Bootstrap resamples for the allowance")
      ->capture_default_str();
  sweep->add_option("--lr", s_cfg.train.learning_rate, "rl step size (<= 0: automatic)")
      ->capture_default_str();
  sweep->add_option("--iters", s_cfg.train.max_iters, "rl iteration cap")->capture_default_str();
  sweep->add_option("--tol", s_cfg.train.tol, "rl stopping tolerance")->capture_default_str();

  // compare-bounds
  std::vector<double> cb_alphas, cb_betas;
  auto* compare = app.add_subcommand("compare-bounds", "Tight KL bound versus the prior bound");
  compare->add_option("--alphas", cb_alphas, "(default 0.01,0.03,...,0.49)")->delimiter(',');
  compare->add_option("--betas", cb_betas, "(default 0.01,0.03,...,0.49)")->delimiter(',');

  // synth
  std::size_t sy_rows = 500, sy_cols = 6;
  auto* synth = app.add_subcommand("synth", "Write a synthetic survey-style CSV");
  synth->add_option("--rows", sy_rows, "Rows")->capture_default_str();
  synth->add_option("--cols", sy_cols, "Answer columns")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version exit 0; every usage error is a parse error.
    return app.exit(e) == 0 ? 0 : ExitCodeFor(ErrorCode::kParse);
  }

  const bool json = g.format == "json";
  try {
    if (bound->parsed()) {
      const ErrorRates r = ErrorRates::Make(b_alpha, b_beta);
      BoundValue value = BoundValue::Finite(0.0);
      if (b_div == "kl") {
        value = KlLowerBound(r);
      } else if (b_div == "tv") {
        value = BoundValue::Finite(TvLowerBound(r));
      } else {
        value = ChiSquareLowerBound(r);
      }
      const double v = value.unbounded() ? INFINITY : value.value();
      std::optional<BoundComparison> cmp;
      if (b_div == "kl" && r.alpha > 0 && r.beta > 0 && r.alpha + r.beta < 1) {
        cmp = CompareBounds(r);
      }
      if (json) {
        nlohmann::json j = {{"divergence", b_div},
                            {"alpha", r.alpha},
                            {"beta", r.beta},
                            {"bound", BoundJson(v)}};
        if (cmp) {
          j["g1"] = cmp->g1;
          j["margin"] = cmp->margin;
        }
        EmitJson(g, j);
      } else {
        std::string text = "divergence,alpha,beta,bound,g1,margin\n" + b_div + "," +
                           FormatDouble(r.alpha) + "," + FormatDouble(r.beta) +
                           "," + FormatDouble(v) + ",";
        if (cmp) text += FormatDouble(cmp->g1) + "," + FormatDouble(cmp->margin);
        else text += ",";
        Emit(g, text + "\n");
      }
      return 0;
    }

    if (calibrate->parsed()) {
      const auto d = Load(c_data);
      std::vector<double> taus = c_taus;
      if (!c_quantiles.empty()) {
        const auto q = ScoreQuantiles(d.base, d.score, c_quantiles);
        taus.insert(taus.end(), q.begin(), q.end());
      }
      if (taus.empty()) taus = ScoreQuantiles(d.base, d.score, DefaultTauQuantileLevels());
      const auto records = Calibrate(d.base, d.score, taus);
      if (json) {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& r : records) j.push_back({{"tau", r.tau}, {"alpha", r.achieved_alpha}});
        EmitJson(g, j);
      } else {
        std::string text = "tau,alpha\n";
        for (const auto& r : records) {
          text += FormatDouble(r.tau) + "," + FormatDouble(r.achieved_alpha) + "\n";
        }
        Emit(g, text);
      }
      return 0;
    }

    if (exact->parsed() || embed->parsed() || rl->parsed() || bom->parsed()) {
      const auto d = Load(p_data);
      const ThresholdDetector detector(d.score, p_tau);

      if (bom->parsed()) {
        const StateSet region = detector.Region(d.base);
        const double alpha = MassOf(d.base, region);
        const BestOfMConfig cfg{m_m, d.score};
        const auto law = BestOfMExactLaw(d.base, cfg);
        const double achieved_beta = 1.0 - MassOf(law, region);
        const FGenerator f = FGenerator::ByName(p_div);
        const double divergence = FDivergence(law, d.base, f);
        const BoundValue bv = LowerBound(
            f, ErrorRates::Make(alpha, std::clamp(achieved_beta, 0.0, 1.0 - alpha)));
        const double b = bv.unbounded() ? INFINITY : bv.value();
        double mc_tv = std::nan("");
        if (m_n > 0) {
          Rng rng(g.seed);
          const BestOfMSampler sampler(d.base, cfg);
          std::vector<double> counts(d.base.universe().size(), 0.0);
          for (std::uint64_t i = 0; i < m_n; ++i) counts[sampler.Sample(rng)] += 1.0;
          mc_tv = TotalVariation(
              FiniteDistribution::FromWeights(d.base.universe_ptr(), counts), law);
        }
        if (json) {
          EmitJson(g, {{"m", m_m},
                       {"tau", p_tau},
                       {"alpha", alpha},
                       {"achieved_beta", achieved_beta},
                       {"divergence_name", p_div},
                       {"divergence", divergence},
                       {"bound", BoundJson(b)},
                       {"margin", BoundJson(divergence - b)},
                       {"n", m_n},
                       {"mc_tv", BoundJson(mc_tv)},
                       {"exact_law", DistributionToJson(law)}});
        } else {
          Emit(g, "m,tau,alpha,achieved_beta,divergence,bound,margin,n,mc_tv\n" +
                      std::to_string(m_m) + "," + FormatDouble(p_tau) + "," +
                      FormatDouble(alpha) + "," + FormatDouble(achieved_beta) + "," +
                      FormatDouble(divergence) + "," + FormatDouble(b) + "," +
                      FormatDouble(divergence - b) + "," + std::to_string(m_n) +
                      "," + FormatDouble(mc_tv) + "\n");
        }
        return 0;
      }

      const WatermarkPlan plan = BuildPlan(d.base, detector, p_beta);

      if (exact->parsed()) {
        const auto g_star = OptimalDistribution(plan);
        const auto att = VerifyAttainment(plan, FGenerator::ByName(p_div));
        if (json) {
          EmitJson(g, {{"plan", PlanToJson(plan)},
                       {"attainment",
                        {{"divergence", p_div},
                         {"achieved", att.achieved},
                         {"bound", att.bound},
                         {"gap", att.gap}}},
                       {"distribution", DistributionToJson(g_star)}});
        } else {
          std::string text = "id,payload_hash,mass\n";
          for (const auto& e : DistributionToJson(g_star)) {
            text += std::to_string(e["id"].get<StateId>()) + "," +
                    e["payload_hash"].get<std::string>() + "," +
                    FormatDouble(e["mass"].get<double>()) + "\n";
          }
          Emit(g, text);
        }
        return 0;
      }

      if (embed->parsed()) {
        RejectionSampler sampler(plan, e_budget);
        Rng rng(g.seed);
        std::vector<StateId> draws;
        draws.reserve(e_n);
        for (std::uint64_t i = 0; i < e_n; ++i) {
          try {
            draws.push_back(sampler.Sample(rng));
          } catch (const Error& e) {
            throw Error(e.code(), "sample " + std::to_string(i) + ": " + e.what());
          }
        }
        nlohmann::json stats = StatsToJson(sampler.stats());
        stats["expected_rate"] = ExpectedAcceptance(plan);
        if (json) {
          EmitJson(g, {{"plan", PlanToJson(plan)}, {"stats", stats}, {"samples", draws}});
        } else {
          std::string text = "id,row\n";
          for (StateId id : draws) {
            text += std::to_string(id) + "," +
                    RowText(d.base.universe().state(id), p_data.delimiter) + "\n";
          }
          Emit(g, text);
          WriteSide(e_stats, stats.dump(2) + "\n");
        }
        return 0;
      }

      // rl
      const RewardSpec reward = WatermarkReward(plan);
      auto [policy, report] = Train(d.base, reward, r_cfg);
      nlohmann::json report_json = ReportToJson(report, r_cfg);
      report_json["closed_form_optimum"] = std::log((1.0 - plan.alpha()) / plan.beta());
      report_json["kl_to_optimal"] = FDivergence(
          policy.Distribution(), OptimalDistribution(plan), FGenerator::KullbackLeibler());
      if (json) {
        EmitJson(g, {{"plan", PlanToJson(plan)},
                     {"reward_coefficient", reward.coefficient},
                     {"policy", PolicyToJson(policy)},
                     {"report", report_json}});
      } else {
        const auto log_pi = policy.LogProbabilities();
        std::string text = "id,logit,probability\n";
        for (std::size_t i = 0; i < log_pi.size(); ++i) {
          text += std::to_string(policy.state_ids()[i]) + "," +
                  FormatDouble(policy.logits()[i]) + "," +
                  FormatDouble(std::exp(log_pi[i])) + "\n";
        }
        Emit(g, text);
        WriteSide(r_report, report_json.dump(2) + "\n");
      }
      if (!report.converged) {
        std::cerr << "error: training did not converge within "
                  << report.iterations << " iterations\n";
        return 4;
      }
      return 0;
    }

    if (sweep->parsed()) {
      const auto d = Load(s_data);
      s_cfg.seed = g.seed;
      s_cfg.generator = ParseGeneratorKind(s_generator);
      std::vector<double> levels = s_quantiles;
      if (s_cfg.taus.empty()) {
        if (levels.empty()) levels = DefaultTauQuantileLevels();
        s_cfg.taus = ScoreQuantiles(d.base, d.score, levels);
      }
      if (s_cfg.betas.empty()) s_cfg.betas = DefaultBetas();
      const auto records = RunSweep(d.base, d.score, s_cfg);
      nlohmann::json meta = {{"data", s_data.data},
                             {"dedupe", s_data.dedupe},
                             {"scores", s_data.scores.empty()
                                            ? "keyed-hash:" + s_data.key
                                            : s_data.scores},
                             {"generator", s_generator},
                             {"divergence", s_cfg.divergence},
                             {"seed", g.seed},
                             {"n_samples", s_cfg.n_samples},
                             {"tau_quantile_levels", levels},
                             {"betas", s_cfg.betas}};
      if (s_cfg.generator == GeneratorKind::kBestOfM) meta["m"] = s_cfg.m;
      if (s_cfg.generator == GeneratorKind::kRl) {
        meta["train"] = {{"learning_rate", s_cfg.train.learning_rate},
                         {"max_iters", s_cfg.train.max_iters},
                         {"tol", s_cfg.train.tol}};
      }
      if (json) {
        EmitJson(g, {{"metadata", meta}, {"records", SweepToJson(records)}});
      } else {
        std::ostringstream os;
        os << DataMetadata(s_data);
        for (auto it = meta.begin(); it != meta.end(); ++it) {
          if (it.key() == "data" || it.key() == "dedupe" || it.key() == "scores") continue;
          os << "# " << it.key() << "=" << it.value().dump() << '\n';
        }
        WriteSweepCsv(os, records);
        Emit(g, os.str());
      }
      return 0;
    }

    if (compare->parsed()) {
      std::vector<double> grid;
      for (int i = 0; i < 25; ++i) grid.push_back(std::round((0.01 + 0.02 * i) * 1e12) / 1e12);
      if (cb_alphas.empty()) cb_alphas = grid;
      if (cb_betas.empty()) cb_betas = grid;
      nlohmann::json j = nlohmann::json::array();
      std::string text = "alpha,beta,g1,g2,margin\n";
      for (double a : cb_alphas) {
        for (double b : cb_betas) {
          if (!(a > 0 && b > 0 && a + b < 1)) continue;
          const auto c = CompareBounds(ErrorRates::Make(a, b));
          j.push_back({{"alpha", a}, {"beta", b}, {"g1", c.g1}, {"g2", c.g2},
                       {"margin", c.margin}});
          text += FormatDouble(a) + "," + FormatDouble(b) + "," + FormatDouble(c.g1) +
                  "," + FormatDouble(c.g2) + "," + FormatDouble(c.margin) + "\n";
        }
      }
      if (json) EmitJson(g, j);
      else Emit(g, text);
      return 0;
    }

    if (synth->parsed()) {
      Emit(g, SyntheticCsv(sy_rows, sy_cols, g.seed));
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error (" << ErrorCodeName(e.code()) << "): " << e.what() << '\n';
    return ExitCodeFor(e.code());
  }
  return 0;
}

}  // namespace wmbound
