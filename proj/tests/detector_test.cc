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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "test_util.h"
#include "wmbound/harness.h"
#include "wmbound/status.h"

namespace wmbound {
namespace {

// Uniform F over 10 states scored 0.05, 0.15, ..., 0.95.
struct TenStates {
  SupportPtr universe = Support::Indexed(10);
  FiniteDistribution base = FiniteDistribution::Uniform(universe);
  ScoreFunction score;

  TenStates() {
    std::vector<double> s(10);
    for (int i = 0; i < 10; ++i) s[i] = 0.05 + 0.1 * i;
    score = ScoreFunction::Table(universe, s);
  }
};

TEST(HashScoreTest, Deterministic) {
  const State x{3, "payload"};
  EXPECT_EQ(HashScore("k", x), HashScore("k", x));
  EXPECT_NE(HashScore("k", x), HashScore("k2", x));
  // Only the payload matters, not the id.
  EXPECT_EQ(HashScore("k", x), HashScore("k", State{7, "payload"}));
}

TEST(HashScoreTest, MarginalIsUniform) {
  const int n = 100000;
  const auto u = Support::Indexed(n);
  std::vector<double> s = ScoreFunction::KeyedHash("uniformity").ScoresFor(u);
  std::sort(s.begin(), s.end());
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    ASSERT_GE(s[i], 0.0);
    ASSERT_LT(s[i], 1.0);
    ks = std::max({ks, (i + 1.0) / n - s[i], s[i] - static_cast<double>(i) / n});
  }
  EXPECT_LE(ks, 0.01);
}

TEST(HashScoreTest, DifferentKeysAreUncorrelated) {
  const int n = 10000;
  const auto u = Support::Indexed(n);
  const auto a = ScoreFunction::KeyedHash("alpha").ScoresFor(u);
  const auto b = ScoreFunction::KeyedHash("beta").ScoresFor(u);
  double ma = 0, mb = 0;
  for (int i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (int i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  EXPECT_LE(std::abs(sab / std::sqrt(saa * sbb)), 0.02);
}

TEST(LoadScoresTest, ById) {
  const auto f = FiniteDistribution::Uniform(Support::Indexed(3));
  std::istringstream in("state_id,score\n0,0.1\n2,0.3\n1,0.2\n");
  const auto s = LoadScores(in, f);
  EXPECT_TRUE(s.is_table());
  EXPECT_EQ(s.Score(f.universe().state(1)), 0.2);
  EXPECT_EQ(s.ScoresFor(f.universe_ptr()), (std::vector<double>{0.1, 0.2, 0.3}));
}

TEST(LoadScoresTest, ByPayloadHashCoversDuplicates) {
  std::istringstream rows("a\nb\na\n");
  const auto f = IngestCsv(rows, {});
  std::ostringstream file;
  file << "payload_sha256,score\n"
       << PayloadSha256("a") << ",0.9\n"
       << PayloadSha256("b") << ",0.1\n";
  std::istringstream in(file.str());
  const auto s = LoadScores(in, f);
  EXPECT_EQ(s.ScoresFor(f.universe_ptr()), (std::vector<double>{0.9, 0.1, 0.9}));
}

TEST(LoadScoresTest, MissingStateIsACoverageErrorNamingIt) {
  const auto f = FiniteDistribution::Uniform(Support::Indexed(4));
  std::istringstream in("0,0.1\n1,0.2\n3,0.4\n");
  try {
    LoadScores(in, f);
    FAIL() << "expected coverage error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCoverage);
    EXPECT_NE(std::string(e.what()).find('2'), std::string::npos) << e.what();
  }
}

TEST(LoadScoresTest, DuplicateStateIsAConflict) {
  const auto f = FiniteDistribution::Uniform(Support::Indexed(2));
  std::istringstream in("0,0.1\n1,0.2\n0,0.3\n");
  try {
    LoadScores(in, f);
    FAIL() << "expected conflict error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConflict);
  }
}

TEST(LoadScoresTest, MalformedRowIsAParseError) {
  const auto f = FiniteDistribution::Uniform(Support::Indexed(2));
  std::istringstream in("0,0.1\n1,abc\n");
  try {
    LoadScores(in, f);
    FAIL() << "expected parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
  }
}

TEST(LoadScoresTest, TableOfHashScoresBehavesLikeBuiltIn) {
  const auto csv = SyntheticCsv(200, 4, 17);
  std::istringstream rows(csv);
  CsvOptions opts;
  opts.has_header = true;
  const auto f = IngestCsv(rows, opts);
  const auto hash = ScoreFunction::KeyedHash("k");
  std::ostringstream file;
  for (StateId id = 0; id < f.universe().size(); ++id) {
    file << id << ',' << FormatDouble(hash.Score(f.universe().state(id))) << '\n';
  }
  std::istringstream in(file.str());
  const auto table = LoadScores(in, f);
  for (double tau : {0.0, 0.1, 0.25, 0.5, 0.77, 0.99}) {
    const ThresholdDetector a(hash, tau), b(table, tau);
    for (const State& x : f.universe().states()) ASSERT_EQ(a.Detect(x), b.Detect(x));
  }
}

TEST(ThresholdDetectorTest, BoundaryIsDetected) {
  TenStates t;
  const ThresholdDetector d(t.score, 0.5);
  EXPECT_TRUE(d.Detect(t.universe->state(9)));   // 0.95
  EXPECT_FALSE(d.Detect(t.universe->state(0)));  // 0.05
  const ThresholdDetector exact(t.score, t.score.Score(t.universe->state(3)));
  EXPECT_TRUE(exact.Detect(t.universe->state(3)));
}

TEST(ThresholdDetectorTest, TableRejectsForeignStates) {
  TenStates t;
  const ThresholdDetector d(t.score, 0.5);
  try {
    d.Detect(State{42, "s42"});
    FAIL() << "expected coverage error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCoverage);
  }
}

TEST(RegionTest, Extremes) {
  TenStates t;
  EXPECT_EQ(ThresholdDetector(t.score, 0.96).Region(t.base).count(), 0u);
  EXPECT_EQ(ThresholdDetector(t.score, 0.05).Region(t.base).count(), 10u);
  const auto top = ThresholdDetector(t.score, 0.5).Region(t.base).ids();
  EXPECT_EQ(top, (std::vector<StateId>{5, 6, 7, 8, 9}));
}

TEST(CalibrateTest, TenStateExample) {
  TenStates t;
  const auto recs = Calibrate(t.base, t.score, {0.96, 0.5, 0.0});
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(recs[0].tau, 0.0);
  EXPECT_EQ(recs[0].achieved_alpha, 1.0);
  EXPECT_NEAR(recs[1].achieved_alpha, 0.5, 1e-15);
  EXPECT_EQ(recs[2].achieved_alpha, 0.0);
}

TEST(CalibrateTest, MonotoneAndConsistentWithMassOf) {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = testing::RandomDistribution(rng, 10 + 37 * trial);
    const auto s = ScoreFunction::KeyedHash("key" + std::to_string(trial));
    std::vector<double> taus(25);
    for (double& tau : taus) tau = UniformDouble(rng);
    const auto recs = Calibrate(f, s, taus);
    for (std::size_t i = 0; i < recs.size(); ++i) {
      if (i > 0) {
        ASSERT_LE(recs[i - 1].tau, recs[i].tau);
        ASSERT_GE(recs[i - 1].achieved_alpha, recs[i].achieved_alpha);
      }
      const double direct =
          MassOf(f, ThresholdDetector(s, recs[i].tau).Region(f));
      ASSERT_EQ(direct, recs[i].achieved_alpha);
    }
  }
}

TEST(ScoreQuantilesTest, SmallestScoreReachingLevel) {
  TenStates t;
  const double levels[] = {0.1, 0.5, 0.55, 1.0};
  const auto q = ScoreQuantiles(t.base, t.score, levels);
  EXPECT_NEAR(q[0], 0.05, 1e-15);
  EXPECT_NEAR(q[1], 0.45, 1e-15);
  EXPECT_NEAR(q[2], 0.55, 1e-15);
  EXPECT_NEAR(q[3], 0.95, 1e-15);
}

}  // namespace
}  // namespace wmbound
