// Copyright 2026 The anchorplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include <gtest/gtest.h>

#include "anchorplan/epdms.h"
#include "anchorplan/evaluation.h"
#include "anchorplan/expert.h"
#include "anchorplan/scenario_gen.h"
#include "test_util.h"

namespace anchorplan {
namespace {

ScoreVector Ones() {
  ScoreVector v;
  v.fill(1.0);
  return v;
}

void SetWeighted(ScoreVector& v, double ttc, double ep, double hc, double lk,
                 double ec) {
  v[int(SubScoreId::kTTC)] = ttc;
  v[int(SubScoreId::kEP)] = ep;
  v[int(SubScoreId::kHC)] = hc;
  v[int(SubScoreId::kLK)] = lk;
  v[int(SubScoreId::kEC)] = ec;
}

Scenario EmptyStraightRoad(double speed) {
  Scenario s;
  s.id = "hand";
  BuildStraightRoad(s);
  s.route = {0};
  s.ego_speed = speed;
  s.speed_limit = speed;
  s.expert = ExpertPlan(s);
  return s;
}

// Filter.

TEST(Filter, MatchesDefinitionOnGrid) {
  const double grid[] = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
  for (double a : grid) {
    for (double h : grid) {
      const double expected = h == 0.0 ? 1.0 : a;
      EXPECT_EQ(Filter(a, h), expected) << "agent " << a << " human " << h;
    }
  }
}

TEST(Filter, RejectsOutOfRange) {
  EXPECT_THROW(Filter(-0.1, 1.0), ScoreRangeError);
  EXPECT_THROW(Filter(0.5, 1.5), ScoreRangeError);
  EXPECT_THROW(Filter(std::numeric_limits<double>::quiet_NaN(), 1.0),
               ScoreRangeError);
}

// Aggregation.

TEST(Epdms, AllOnesIsOne) {
  EXPECT_DOUBLE_EQ(Epdms(Ones(), EpdmsConfig{}), 1.0);
}

TEST(Epdms, HandComputedWeightedMean) {
  ScoreVector v = Ones();
  SetWeighted(v, 1.0, 0.5, 1.0, 1.0, 1.0);
  EXPECT_NEAR(Epdms(v, EpdmsConfig{}), 0.84375, 1e-12);
}

TEST(Epdms, AnyZeroPenaltyGivesZero) {
  for (SubScoreId p : kPenaltyScores) {
    ScoreVector v = Ones();
    v[int(p)] = 0.0;
    EXPECT_EQ(Epdms(v, EpdmsConfig{}), 0.0) << SubScoreName(p);
  }
}

TEST(Epdms, MapOverloadAgreesAndRequiresEverySubScore) {
  ScoreVector v = Ones();
  SetWeighted(v, 0.0, 0.25, 1.0, 0.0, 1.0);
  std::map<SubScoreId, double> m;
  for (int i = 0; i < kNumSubScores; ++i) m[SubScoreId(i)] = v[i];
  EXPECT_EQ(Epdms(m, EpdmsConfig{}), Epdms(v, EpdmsConfig{}));
  m.erase(SubScoreId::kHC);
  EXPECT_THROW(Epdms(m, EpdmsConfig{}), std::invalid_argument);
}

TEST(Epdms, BoundedAndMonotoneInEverySubScore) {
  Rng rng(7);
  const EpdmsConfig cfg;
  for (int trial = 0; trial < 500; ++trial) {
    ScoreVector v;
    for (double& x : v) x = rng.Uniform();
    const double base = Epdms(v, cfg);
    EXPECT_GE(base, 0.0);
    EXPECT_LE(base, 1.0);
    for (int i = 0; i < kNumSubScores; ++i) {
      ScoreVector up = v;
      up[i] = std::min(1.0, v[i] + rng.Uniform(0.0, 0.5));
      EXPECT_GE(Epdms(up, cfg), base - 1e-15);
    }
  }
}

TEST(EpdmsConfig, WeightsAndValidation) {
  const EpdmsConfig c;
  EXPECT_EQ(c.Weight(SubScoreId::kTTC), 5.0);
  EXPECT_EQ(c.Weight(SubScoreId::kEP), 5.0);
  EXPECT_EQ(c.Weight(SubScoreId::kHC), 2.0);
  EXPECT_EQ(c.Weight(SubScoreId::kLK), 2.0);
  EXPECT_EQ(c.Weight(SubScoreId::kEC), 2.0);
  EXPECT_THROW(c.Weight(SubScoreId::kNC), std::invalid_argument);
  EpdmsConfig bad;
  bad.w_ep = 0.0;
  EXPECT_THROW(bad.Validate(), std::invalid_argument);
  EXPECT_EQ(ToJson(EpdmsConfigFromJson(ToJson(c))), ToJson(c));
}

TEST(SubScoreId, PartitionAndNames) {
  int penalties = 0;
  for (int i = 0; i < kNumSubScores; ++i) penalties += IsPenalty(SubScoreId(i));
  EXPECT_EQ(penalties, 4);
  EXPECT_EQ(SubScoreName(SubScoreId::kTLC), "TL");
  EXPECT_EQ(CsvHeader(), "id,NC,DAC,DDC,TL,EP,TTC,LK,HC,EC,EPDMS");
}

TEST(MakeReport, FiltersThenAggregates) {
  ScoreVector agent = Ones();
  ScoreVector human = Ones();
  agent[int(SubScoreId::kNC)] = 0.0;
  human[int(SubScoreId::kNC)] = 0.0;  // human also fails: filtered to 1
  agent[int(SubScoreId::kEP)] = 0.5;
  const EpdmsReport r = MakeReport("x", agent, human, EpdmsConfig{});
  EXPECT_EQ(r.filtered[int(SubScoreId::kNC)], 1.0);
  EXPECT_NEAR(r.epdms, 0.84375, 1e-12);
  EXPECT_EQ(CsvRow(r),
            "x,1.000000,1.000000,1.000000,1.000000,0.500000,1.000000,"
            "1.000000,1.000000,1.000000,0.843750");
}

// Corpus aggregation.

TEST(CorpusEpdms, MeansOfScoresAndColumns) {
  ScoreVector a = Ones();
  ScoreVector b = Ones();
  b[int(SubScoreId::kDAC)] = 0.0;
  SetWeighted(a, 1.0, 0.5, 1.0, 1.0, 1.0);
  const EpdmsConfig cfg;
  const std::vector<EpdmsReport> reports = {MakeReport("a", a, Ones(), cfg),
                                            MakeReport("b", b, Ones(), cfg)};
  const CorpusSummary s = CorpusEpdms(reports);
  EXPECT_EQ(s.count, 2u);
  EXPECT_NEAR(s.epdms, 0.84375 / 2.0, 1e-12);
  EXPECT_NEAR(s.mean_filtered[int(SubScoreId::kDAC)], 0.5, 1e-12);
  EXPECT_NEAR(s.mean_filtered[int(SubScoreId::kEP)], 0.75, 1e-12);
  EXPECT_EQ(CsvSummaryRow("mean", s).substr(0, 5), "mean,");
}

TEST(CorpusEpdms, DuplicatingReportsKeepsMean) {
  ScoreVector a = Ones();
  SetWeighted(a, 0.0, 0.3, 1.0, 0.0, 1.0);
  const EpdmsReport r1 = MakeReport("a", a, Ones(), EpdmsConfig{});
  const EpdmsReport r2 = MakeReport("b", Ones(), Ones(), EpdmsConfig{});
  const double once = CorpusEpdms({r1, r2}).epdms;
  EXPECT_NEAR(CorpusEpdms({r1, r2, r1, r2}).epdms, once, 1e-15);
}

TEST(CorpusEpdms, EmptyThrows) {
  EXPECT_THROW(CorpusEpdms({}), std::invalid_argument);
}

// Sub-scores on hand-built worlds.

TEST(SubScore, ExpertOnEmptyRoadPassesEverything) {
  const Scenario s = EmptyStraightRoad(8.0);
  const ScoreVector v = AllSubScores(s.expert, s, EpdmsConfig{});
  for (int i = 0; i < kNumSubScores; ++i) {
    EXPECT_EQ(v[i], 1.0) << SubScoreName(SubScoreId(i));
  }
  EXPECT_DOUBLE_EQ(Evaluate(s.expert, s, EpdmsConfig{}).epdms, 1.0);
}

TEST(SubScore, StandingStillFromRestMakesNoProgress) {
  const Scenario s = EmptyStraightRoad(8.0);
  Scenario rest = s;
  rest.ego_speed = 0.0;
  Trajectory still = s.expert;
  for (Pose2D& p : still.waypoints) p = Pose2D(0.0, 0.0, 0.0);
  const EpdmsConfig cfg;
  EXPECT_EQ(SubScore(SubScoreId::kEP, still, rest, cfg), 0.0);
  EXPECT_EQ(SubScore(SubScoreId::kHC, still, rest, cfg), 1.0);
  EXPECT_EQ(SubScore(SubScoreId::kEC, still, rest, cfg), 1.0);
  EXPECT_EQ(SubScore(SubScoreId::kNC, still, rest, cfg), 1.0);
  // Braking from 8 m/s to rest within one half-step exceeds the limit.
  EXPECT_EQ(SubScore(SubScoreId::kHC, still, s, cfg), 0.0);
}

TEST(SubScore, HalfwayProgressScoresHalf) {
  const Scenario s = EmptyStraightRoad(8.0);
  Trajectory half = s.expert;
  for (Pose2D& p : half.waypoints) p.x *= 0.5;
  EXPECT_NEAR(SubScore(SubScoreId::kEP, half, s, EpdmsConfig{}), 0.5, 1e-9);
}

TEST(SubScore, LeavingRoadFailsDrivableAndLaneKeeping) {
  const Scenario s = EmptyStraightRoad(8.0);
  Trajectory off = s.expert;
  for (Pose2D& p : off.waypoints) p.y = -30.0;
  const EpdmsConfig cfg;
  EXPECT_EQ(SubScore(SubScoreId::kDAC, off, s, cfg), 0.0);
  EXPECT_EQ(SubScore(SubScoreId::kLK, off, s, cfg), 0.0);
}

TEST(SubScore, ReversingFailsDrivingDirection) {
  const Scenario s = EmptyStraightRoad(8.0);
  Trajectory back = s.expert;
  for (Pose2D& p : back.waypoints) p = Pose2D(p.x, 0.0, M_PI);
  EXPECT_EQ(SubScore(SubScoreId::kDDC, back, s, EpdmsConfig{}), 0.0);
}

TEST(SubScore, ObstacleAheadTriggersCollisionAndTtc) {
  Scenario s = EmptyStraightRoad(8.0);
  s.obstacles.push_back({{s.expert.waypoints[3].x, 0.0}});
  const EpdmsConfig cfg;
  EXPECT_EQ(SubScore(SubScoreId::kNC, s.expert, s, cfg), 0.0);
  EXPECT_EQ(SubScore(SubScoreId::kTTC, s.expert, s, cfg), 0.0);
  // The same obstacle one lane over is harmless.
  s.obstacles[0].center.y = 2.0 * kLaneWidth + 3.0;
  EXPECT_EQ(SubScore(SubScoreId::kNC, s.expert, s, cfg), 1.0);
  EXPECT_EQ(SubScore(SubScoreId::kTTC, s.expert, s, cfg), 1.0);
}

TEST(SubScore, RedLightCrossingMatchesSegmentOracle) {
  int crossings = 0;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const Scenario s = GenerateScenario(seed, Template::kRedLight);
    ASSERT_TRUE(s.traffic_light.has_value());
    EXPECT_EQ(SubScore(SubScoreId::kTLC, s.expert, s, EpdmsConfig{}), 1.0);
    // Drive straight through at speed.
    Trajectory run = s.expert;
    for (int i = 0; i < run.horizon(); ++i) {
      run.waypoints[i] = Pose2D(12.0 * 0.5 * (i + 1), 0.0, 0.0);
    }
    const Trajectory world = ToWorldFrame(run, s.ego_start);
    bool crosses = false;
    Vec2 prev{s.ego_start.x, s.ego_start.y};
    for (const Pose2D& p : world.waypoints) {
      const Vec2 cur{p.x, p.y};
      crosses = crosses || SegmentsIntersect(prev, cur,
                                             s.traffic_light->stop_line_a,
                                             s.traffic_light->stop_line_b);
      prev = cur;
    }
    crossings += crosses;
    EXPECT_EQ(CrossesRedLight(run, s), crosses);
    EXPECT_EQ(SubScore(SubScoreId::kTLC, run, s, EpdmsConfig{}),
              crosses ? 0.0 : 1.0);
  }
  EXPECT_GT(crossings, 0);
}

TEST(SubScore, HorizonMismatchThrows) {
  const Scenario s = EmptyStraightRoad(8.0);
  Trajectory short_t = s.expert;
  short_t.waypoints.pop_back();
  EXPECT_THROW(SubScore(SubScoreId::kNC, short_t, s, EpdmsConfig{}),
               HorizonMismatch);
}

TEST(Kinematics, ConstantSpeedHasZeroAccelerationAndJerk) {
  const Trajectory t = testing::StraightLine(8, 6.0);
  for (const auto& [time, a] : Accelerations(t, 6.0)) {
    EXPECT_NEAR(a.Norm(), 0.0, 1e-12) << time;
  }
  for (double j : JerkMagnitudes(t)) EXPECT_NEAR(j, 0.0, 1e-12);
  const auto v = VelocitySamples(t, 6.0);
  ASSERT_EQ(v.size(), 9u);
  EXPECT_DOUBLE_EQ(v[3].first, 1.25);
  EXPECT_NEAR(v[3].second.x, 6.0, 1e-12);
}

TEST(Kinematics, ConstantAccelerationOracle) {
  // x = 0.5 a t^2 sampled at t = 0.5 (i + 1), from rest.
  Trajectory t;
  const double acc = 2.0;
  for (int i = 1; i <= 8; ++i) {
    const double time = 0.5 * i;
    t.waypoints.emplace_back(0.5 * acc * time * time, 0.0, 0.0);
  }
  for (const auto& [time, a] : Accelerations(t, 0.0)) {
    EXPECT_NEAR(a.x, acc, 1e-9) << time;
  }
  for (double j : JerkMagnitudes(t)) EXPECT_NEAR(j, 0.0, 1e-9);
}

// Expert reference.

TEST(ExpertReference, EveryTemplateScoresAtLeastNinety) {
  const std::vector<Scenario> corpus = GenerateBatch(21, 20);
  EvalOptions o;
  o.expert_bypass = true;
  const EvalResult r = EvaluateCorpusParallel(nullptr, corpus, o, EpdmsConfig{});
  const auto per = PerTemplate(corpus, r);
  EXPECT_EQ(per.size(), kAllTemplates.size());
  for (const auto& [kind, summary] : per) {
    EXPECT_GE(summary.epdms, 0.9) << TemplateName(kind);
    EXPECT_EQ(summary.count, 20u);
  }
}

}  // namespace
}  // namespace anchorplan
