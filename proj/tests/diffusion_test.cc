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
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "anchorplan/checkpoint.h"
#include "anchorplan/evaluation.h"
#include "anchorplan/noise_schedule.h"
#include "anchorplan/planner.h"
#include "anchorplan/trainer.h"
#include "model_fixture.h"
#include "test_util.h"

namespace anchorplan {
namespace {

// Schedule.

class ScheduleKinds : public ::testing::TestWithParam<const char*> {};

TEST_P(ScheduleKinds, StartsAtOneAndDecreasesStrictly) {
  const NoiseSchedule s(100, GetParam());
  EXPECT_EQ(s.T(), 100);
  EXPECT_DOUBLE_EQ(s.AlphaBar(0), 1.0);
  for (int t = 1; t <= s.T(); ++t) {
    EXPECT_LT(s.AlphaBar(t), s.AlphaBar(t - 1)) << "t=" << t;
    EXPECT_GT(s.AlphaBar(t), 0.0) << "t=" << t;
  }
  EXPECT_LT(s.AlphaBar(s.T()), 5e-3);
}

TEST_P(ScheduleKinds, OutOfRangeLevelThrows) {
  const NoiseSchedule s(50, GetParam());
  EXPECT_THROW(s.AlphaBar(-1), ScheduleError);
  EXPECT_THROW(s.AlphaBar(51), ScheduleError);
  EXPECT_NO_THROW(s.AlphaBar(50));
}

INSTANTIATE_TEST_SUITE_P(Kinds, ScheduleKinds,
                         ::testing::Values("cosine", "linear"));

TEST(NoiseSchedule, CosineMatchesClosedFormAwayFromClipping) {
  const NoiseSchedule s(100, "cosine");
  auto f = [](double t) {
    const double v = std::cos((t / 100.0 + 0.008) / 1.008 * M_PI / 2.0);
    return v * v;
  };
  for (int t : {1, 10, 30, 50, 80}) {
    EXPECT_NEAR(s.AlphaBar(t), f(t) / f(0), 1e-12) << "t=" << t;
  }
}

TEST(NoiseSchedule, UnknownKindThrows) {
  EXPECT_THROW(NoiseSchedule(100, "sigmoid"), ScheduleError);
}

// Forward noising.

TEST(ForwardNoise, LevelZeroIsIdentity) {
  const NoiseSchedule s;
  const std::vector<double> x0 = {1.5, -2.0, 3.25};
  const std::vector<double> eps = {0.3, 0.7, -1.1};
  EXPECT_EQ(ForwardNoise(x0, 0, eps, s), x0);
}

TEST(ForwardNoise, OracleValue) {
  const NoiseSchedule s;
  const std::vector<double> x0 = {2.0, -1.0};
  const std::vector<double> eps = {0.5, 1.5};
  const double ab = s.AlphaBar(30);
  const std::vector<double> xt = ForwardNoise(x0, 30, eps, s);
  EXPECT_NEAR(xt[0], std::sqrt(ab) * 2.0 + std::sqrt(1 - ab) * 0.5, 1e-14);
  EXPECT_NEAR(xt[1], -std::sqrt(ab) + std::sqrt(1 - ab) * 1.5, 1e-14);
}

TEST(ForwardNoise, IsLinearInSignalAndNoise) {
  const NoiseSchedule s;
  Rng rng(4);
  std::vector<double> a(16), b(16), e1(16), e2(16);
  for (auto* v : {&a, &b, &e1, &e2}) {
    for (double& x : *v) x = rng.Normal();
  }
  std::vector<double> ab(16), e12(16);
  for (int i = 0; i < 16; ++i) {
    ab[i] = a[i] + b[i];
    e12[i] = e1[i] + e2[i];
  }
  for (int t : {5, 40, 95}) {
    const auto lhs = ForwardNoise(ab, t, e12, s);
    const auto x = ForwardNoise(a, t, e1, s);
    const auto y = ForwardNoise(b, t, e2, s);
    for (int i = 0; i < 16; ++i) EXPECT_NEAR(lhs[i], x[i] + y[i], 1e-12);
  }
}

TEST(ForwardNoise, MonteCarloMomentsMatchMarginal) {
  const NoiseSchedule s;
  const std::vector<double> x0 = {3.0};
  for (int t : {10, 50, 90}) {
    Rng rng(100 + t);
    const int n = 10000;
    double sum = 0.0, sq = 0.0;
    for (int k = 0; k < n; ++k) {
      const std::vector<double> eps = {rng.Normal()};
      const double v = ForwardNoise(x0, t, eps, s)[0];
      sum += v;
      sq += v * v;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    const double ab = s.AlphaBar(t);
    EXPECT_NEAR(mean, std::sqrt(ab) * 3.0, 0.05 * std::sqrt(ab) * 3.0 + 0.03)
        << "t=" << t;
    EXPECT_NEAR(var, 1.0 - ab, 0.05 * (1.0 - ab)) << "t=" << t;
  }
}

TEST(ForwardNoise, SizeMismatchThrows) {
  const NoiseSchedule s;
  const std::vector<double> x0 = {1.0, 2.0};
  const std::vector<double> eps = {1.0};
  EXPECT_ANY_THROW(ForwardNoise(x0, 3, eps, s));
}

TEST(PredictX0, InvertsForwardNoiseWithTrueNoise) {
  const NoiseSchedule s;
  Rng rng(8);
  std::vector<double> x0(12), eps(12);
  for (double& v : x0) v = 4.0 * rng.Normal();
  for (double& v : eps) v = rng.Normal();
  for (int t : {1, 30, 99}) {
    const auto back = PredictX0(ForwardNoise(x0, t, eps, s), t, eps, s);
    for (int i = 0; i < 12; ++i) EXPECT_NEAR(back[i], x0[i], 1e-8);
  }
}

TEST(ReverseStep, ToZeroReturnsPrediction) {
  const NoiseSchedule s;
  const std::vector<double> xt = {0.4, -0.2};
  const std::vector<double> eps = {0.1, 0.9};
  EXPECT_EQ(ReverseStep(xt, 20, 0, eps, s), PredictX0(xt, 20, eps, s));
  EXPECT_THROW(ReverseStep(xt, 20, 20, eps, s), ScheduleError);
}

TEST(ReverseTimesteps, EvenlySpacedAndEndsAtZero) {
  EXPECT_EQ(ReverseTimesteps(30, 1), (std::vector<int>{30, 0}));
  EXPECT_EQ(ReverseTimesteps(30, 2), (std::vector<int>{30, 15, 0}));
  EXPECT_EQ(ReverseTimesteps(30, 3), (std::vector<int>{30, 20, 10, 0}));
  EXPECT_EQ(ReverseTimesteps(30, 0), (std::vector<int>{30}));
  for (int steps = 1; steps <= 40; ++steps) {
    const std::vector<int> ts = ReverseTimesteps(30, steps);
    EXPECT_EQ(ts.front(), 30);
    EXPECT_EQ(ts.back(), 0);
    EXPECT_EQ(int(ts.size()), std::min(steps, 30) + 1) << steps;
    for (size_t k = 1; k < ts.size(); ++k) EXPECT_LT(ts[k], ts[k - 1]);
  }
}

// Truncated sampling with a scripted predictor.

// Predicts the noise that makes every residual collapse onto `target`;
// scores by a fixed vector.
class OraclePredictor : public NoisePredictor {
 public:
  OraclePredictor(const NoiseSchedule& s, std::vector<double> target,
                  std::vector<double> scores)
      : s_(s), target_(std::move(target)), scores_(std::move(scores)) {}

  Tensor2 PredictNoise(const Tensor2& r, const Tensor2& anchors,
                       int t) const override {
    ++calls;
    EXPECT_TRUE(r.SameShape(anchors));
    const double ab = s_.AlphaBar(t);
    Tensor2 out(r.rows(), r.cols());
    for (int i = 0; i < r.rows(); ++i) {
      for (int j = 0; j < r.cols(); ++j) {
        out(i, j) = (r(i, j) - std::sqrt(ab) * target_[j]) / std::sqrt(1 - ab);
      }
    }
    return out;
  }
  std::vector<double> Score(const Tensor2& c) const override {
    std::vector<double> v = scores_;
    v.resize(c.rows(), -1.0);
    return v;
  }

  mutable int calls = 0;

 private:
  const NoiseSchedule& s_;
  std::vector<double> target_;
  std::vector<double> scores_;
};

AnchorSet ThreeAnchors() {
  AnchorSet a;
  for (int k = 0; k < 3; ++k) {
    Rng rng(50 + k);
    a.anchors.push_back(testing::RandomFlat(rng, 8));
    a.provenance.push_back(k == 0 ? AnchorSource::kDynamic
                                  : AnchorSource::kStatic);
  }
  return a;
}

TEST(TruncatedSample, ZeroStepsReturnsAnchorsUnchanged) {
  const NoiseSchedule s;
  const AnchorSet a = ThreeAnchors();
  OraclePredictor p(s, std::vector<double>(16, 1.0), {0.1, 0.5, 0.2});
  const PlanResult r = TruncatedSample(a, p, s, 30, 0, 7);
  EXPECT_EQ(r.candidates, a.anchors);
  EXPECT_EQ(p.calls, 0);
  EXPECT_EQ(r.selected, 1);
  EXPECT_EQ(r.provenance, AnchorSource::kStatic);
}

TEST(TruncatedSample, OracleRecoversTargetForAnyStepCount) {
  const NoiseSchedule s;
  const AnchorSet a = ThreeAnchors();
  Rng rng(9);
  const FlatTrajectory target = testing::RandomFlat(rng, 8, 0.5);
  for (int steps = 1; steps <= 5; ++steps) {
    OraclePredictor p(s, target.values, {0.9, 0.1, 0.3});
    const PlanResult r = TruncatedSample(a, p, s, 30, steps, 11);
    EXPECT_EQ(p.calls, steps);
    for (size_t k = 0; k < a.size(); ++k) {
      for (int j = 0; j < 16; ++j) {
        EXPECT_NEAR(r.candidates[k].values[j],
                    a.anchors[k].values[j] + target.values[j], 1e-9);
      }
    }
    EXPECT_EQ(r.selected, 0);
    EXPECT_EQ(r.provenance, AnchorSource::kDynamic);
    EXPECT_EQ(Flatten(r.trajectory), r.candidates[0]);
  }
}

TEST(TruncatedSample, TiesSelectLowestIndexAndSeedIsDeterministic) {
  const NoiseSchedule s;
  const AnchorSet a = ThreeAnchors();
  // A predictor that returns zero noise keeps the seed's draw visible.
  class ZeroPredictor : public NoisePredictor {
   public:
    Tensor2 PredictNoise(const Tensor2& r, const Tensor2&, int) const override {
      return Tensor2(r.rows(), r.cols());
    }
    std::vector<double> Score(const Tensor2& c) const override {
      return std::vector<double>(c.rows(), 0.5);
    }
  } zero;
  const PlanResult x = TruncatedSample(a, zero, s, 30, 2, 5);
  const PlanResult y = TruncatedSample(a, zero, s, 30, 2, 5);
  const PlanResult z = TruncatedSample(a, zero, s, 30, 2, 6);
  EXPECT_EQ(x.selected, 0);
  EXPECT_EQ(x.candidates, y.candidates);
  EXPECT_NE(x.candidates, z.candidates);
}

TEST(TruncatedSample, RejectsBadInputs) {
  const NoiseSchedule s;
  OraclePredictor p(s, std::vector<double>(16, 0.0), {});
  EXPECT_THROW(TruncatedSample(AnchorSet{}, p, s, 30, 2, 0),
               std::invalid_argument);
  EXPECT_THROW(TruncatedSample(ThreeAnchors(), p, s, 30, -1, 0),
               std::invalid_argument);
}

TEST(ArgmaxLowest, PicksFirstMaximum) {
  EXPECT_EQ(ArgmaxLowest({0.1, 0.7, 0.7, 0.2}), 1);
  EXPECT_EQ(ArgmaxLowest({3.0}), 0);
  EXPECT_EQ(ArgmaxLowest({-1.0, -1.0}), 0);
}

TEST(PlannerConfig, DefaultsAndValidation) {
  PlannerConfig c;
  EXPECT_EQ(c.steps, 2);
  EXPECT_EQ(c.T, 100);
  EXPECT_EQ(c.k_static, 16);
  EXPECT_EQ(c.k_dynamic, 4);
  EXPECT_NO_THROW(c.Validate());
  c.t_trunc = 101;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
  c = PlannerConfig{};
  c.steps = -1;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
  EXPECT_EQ(ToJson(PlannerConfigFromJson(ToJson(PlannerConfig{}))),
            ToJson(PlannerConfig{}));
}

TEST(InitMode, NamesRoundTrip) {
  for (InitMode m : {InitMode::kHybrid, InitMode::kStaticOnly, InitMode::kNoise}) {
    EXPECT_EQ(InitModeFromName(InitModeName(m)), m);
  }
}

// Denoiser.

TEST(TimeEmbedding, SinThenCos) {
  const std::vector<double> e = TimeEmbedding(7, 8);
  ASSERT_EQ(e.size(), 8u);
  for (int i = 0; i < 4; ++i) {
    const double w = std::pow(10000.0, -i / 4.0);
    EXPECT_DOUBLE_EQ(e[i], std::sin(7 * w));
    EXPECT_DOUBLE_EQ(e[4 + i], std::cos(7 * w));
  }
  const std::vector<double> z = TimeEmbedding(0, 8);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(z[i], 0.0);
    EXPECT_EQ(z[4 + i], 1.0);
  }
}

TEST(Denoiser, GaussianEstimateIsotropicPriorOracle) {
  DenoiserModel m(DenoiserConfig{}, 1);
  const int d = m.config().traj_dim();
  Tensor2 cov(d, d);
  for (int i = 0; i < d; ++i) cov(i, i) = 2.0;
  m.SetResidualPrior(cov);
  Rng rng(2);
  Tensor2 r(3, d);
  for (size_t i = 0; i < r.size(); ++i) r[i] = rng.Normal();
  for (int t : {1, 15, 30}) {
    const double ab = m.schedule().AlphaBar(t);
    const double sigma = std::sqrt(1 - ab);
    const Tensor2 g = m.GaussianNoiseEstimate(r, t);
    for (size_t i = 0; i < r.size(); ++i) {
      EXPECT_NEAR(g[i], sigma * r[i] / (2.0 * ab + sigma * sigma), 1e-12);
    }
  }
}

TEST(Denoiser, CheckpointRoundTripPreservesPredictions) {
  testing::SmallWorld w(3);
  const TrainExample& ex = w.data[0];
  auto predict = [&](const PlannerModels& models) {
    Graph g;
    const Var tokens = models.decoder.Encode(g, ex.bundle);
    const Var ctx = models.denoiser.Context(g, tokens);
    const Tensor2 a = StackAnchors(w.vocab.anchors);
    Tensor2 r(a.rows(), a.cols(), 0.3);
    std::vector<int> ts(a.rows(), 12);
    return g.value(models.denoiser.PredictNoise(g, r, a, ts, ctx));
  };
  Checkpoint ck;
  AddParameters(ck, w.models.denoiser.params());
  const Checkpoint back = ParseCheckpoint(SerializeCheckpoint(ck));
  PlannerModels other(DecoderConfig{}, DenoiserConfig{}, 3);
  LoadParameters(back, other.denoiser.params());
  const Tensor2 x = predict(w.models);
  const Tensor2 y = predict(other);
  ASSERT_TRUE(x.SameShape(y));
  for (size_t i = 0; i < x.size(); ++i) EXPECT_EQ(x[i], y[i]);
}

// Training objective.

TEST(SoftLabels, NormalizedAndFavorCloserCandidates) {
  const FlatTrajectory expert(std::vector<double>(16, 0.0));
  std::vector<FlatTrajectory> c = {FlatTrajectory(std::vector<double>(16, 2.0)),
                                   FlatTrajectory(std::vector<double>(16, 0.1)),
                                   FlatTrajectory(std::vector<double>(16, 1.0))};
  const Tensor2 l = SoftLabels(c, expert, 0.5);
  ASSERT_EQ(l.rows(), 3);
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) {
    EXPECT_GE(l(i, 0), 0.0);
    sum += l(i, 0);
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_GT(l(1, 0), l(2, 0));
  EXPECT_GT(l(2, 0), l(0, 0));
}

TEST(ResidualCovariance, MatchesSampleCovariancePlusRidge) {
  const std::vector<std::vector<double>> r = {{1.0, 2.0}, {-1.0, 0.0},
                                              {0.0, -2.0}};
  const Tensor2 c = ResidualCovariance(r, 0.5);
  // Second moment about zero: mean of r r^T.
  EXPECT_NEAR(c(0, 0), 2.0 / 3.0 + 0.5, 1e-12);
  EXPECT_NEAR(c(1, 1), 8.0 / 3.0 + 0.5, 1e-12);
  EXPECT_NEAR(c(0, 1), 2.0 / 3.0, 1e-12);
  EXPECT_EQ(c(0, 1), c(1, 0));
}

TEST(LearningRate, WarmupThenCosineDecay) {
  TrainConfig tc;
  tc.lr = 1e-2;
  tc.lr_final = 1e-4;
  EXPECT_NEAR(LearningRate(tc, 0, 4, 20), 2.5e-3, 1e-15);
  EXPECT_NEAR(LearningRate(tc, 3, 4, 20), 1e-2, 1e-15);
  EXPECT_NEAR(LearningRate(tc, 4, 4, 20), 1e-2, 1e-15);
  EXPECT_NEAR(LearningRate(tc, 20, 4, 20), 1e-4, 1e-15);
  double prev = LearningRate(tc, 4, 4, 20);
  for (int s = 5; s <= 20; ++s) {
    const double v = LearningRate(tc, s, 4, 20);
    EXPECT_LE(v, prev);
    prev = v;
  }
}

TEST(SampleLoss, FrozenDrawsGiveRepeatableValue) {
  testing::SmallWorld w(3);
  const NoiseSchedule schedule(w.pc.T, w.pc.schedule);
  FrozenDraws draws;
  Rng rng(5);
  LossParts parts;
  double first = 0.0;
  for (int k = 0; k < 2; ++k) {
    Graph g;
    const Var l = SampleLoss(g, w.models, w.vocab, w.pc, schedule, w.data[2],
                             draws, rng, 0.01, &parts);
    if (k == 0) first = g.value(l)[0];
    else EXPECT_EQ(g.value(l)[0], first);
  }
  EXPECT_TRUE(draws.ready);
  EXPECT_EQ(draws.anchors.size(), 20u);
  EXPECT_GE(draws.t, 1);
  EXPECT_LE(draws.t, w.pc.t_trunc);
  EXPECT_NEAR(parts.total, parts.decoder + parts.noise + parts.confidence,
              1e-12);
}

TEST(SampleLoss, GradientsMatchFiniteDifferences) {
  testing::SmallWorld w(3);
  for (int i : {0, 3}) {
    EXPECT_LT(testing::FullLossGradientError(w, w.data[i], 50, 31 + i), 1e-4)
        << "example " << i;
  }
}

TEST(Train, LossDecreasesAndIsDeterministic) {
  auto run = [] {
    testing::SmallWorld w(3);
    TrainConfig tc;
    tc.epochs = 4;
    tc.batch_size = 4;
    tc.warmup_epochs = 1;
    tc.seed = 9;
    int calls = 0;
    const TrainHistory h = Train(w.models, w.vocab, w.pc, w.data, tc,
                                 [&](int, const LossParts&) { ++calls; });
    EXPECT_EQ(calls, 4);
    return h;
  };
  const TrainHistory a = run();
  const TrainHistory b = run();
  ASSERT_EQ(a.epochs.size(), 4u);
  EXPECT_LT(a.epochs.back().total, a.epochs.front().total);
  for (size_t e = 0; e < a.epochs.size(); ++e) {
    EXPECT_TRUE(std::isfinite(a.epochs[e].total));
    EXPECT_EQ(a.epochs[e].total, b.epochs[e].total);
  }
}

// Planner and corpus evaluation.

TEST(Planner, AnchorCountsPerMode) {
  testing::SmallWorld w(3);
  const Planner p(w.models.decoder, w.models.denoiser, w.vocab, w.pc);
  const PerceptionBundle& b = w.data[0].bundle;
  const AnchorSet h = p.Anchors(b, InitMode::kHybrid);
  EXPECT_EQ(h.size(), 20u);
  EXPECT_EQ(h.Count(AnchorSource::kDynamic), 4);
  EXPECT_EQ(p.Anchors(b, InitMode::kStaticOnly).size(), 16u);
  const AnchorSet n = p.Anchors(b, InitMode::kNoise);
  for (const FlatTrajectory& f : n.anchors) {
    for (double v : f.values) EXPECT_EQ(v, 0.0);
  }
}

TEST(Planner, PlanIsDeterministicPerSeed) {
  testing::SmallWorld w(3);
  const Planner p(w.models.decoder, w.models.denoiser, w.vocab, w.pc);
  const PerceptionBundle& b = w.data[1].bundle;
  const PlanResult x = p.Plan(b, InitMode::kHybrid, 2, 4);
  const PlanResult y = p.Plan(b, InitMode::kHybrid, 2, 4);
  EXPECT_EQ(x.candidates, y.candidates);
  EXPECT_EQ(x.selected, y.selected);
  EXPECT_TRUE(IsFinite(x.trajectory));
}

TEST(Evaluation, ParallelMatchesSerialBitwise) {
  testing::SmallWorld w(3);
  const Planner p(w.models.decoder, w.models.denoiser, w.vocab, w.pc);
  EvalOptions o;
  o.seed = 3;
  const EvalResult a = EvaluateCorpusSerial(&p, w.corpus, o, EpdmsConfig{});
  const EvalResult b = EvaluateCorpusParallel(&p, w.corpus, o, EpdmsConfig{});
  EXPECT_EQ(ReportCsv(a), ReportCsv(b));
  EXPECT_EQ(a.ade, b.ade);
  EXPECT_EQ(a.summary.epdms, b.summary.epdms);
}

TEST(Evaluation, ExpertBypassPassesEveryPenalty) {
  const std::vector<Scenario> corpus = GenerateBatch(12, 2);
  EvalOptions o;
  o.expert_bypass = true;
  const EvalResult r =
      EvaluateCorpusParallel(nullptr, corpus, o, EpdmsConfig{});
  ASSERT_EQ(r.reports.size(), corpus.size());
  for (size_t i = 0; i < r.reports.size(); ++i) {
    for (SubScoreId id : kPenaltyScores) {
      EXPECT_EQ(r.reports[i].filtered[int(id)], 1.0) << corpus[i].id;
    }
    EXPECT_EQ(r.reports[i].agent, r.reports[i].human);
    EXPECT_EQ(r.ade[i], 0.0);
  }
  EXPECT_GE(r.summary.epdms, 0.9);
}

TEST(Evaluation, PlanSeedDependsOnScenario) {
  EXPECT_EQ(ScenarioPlanSeed(1, "a"), ScenarioPlanSeed(1, "a"));
  EXPECT_NE(ScenarioPlanSeed(1, "a"), ScenarioPlanSeed(1, "b"));
  EXPECT_NE(ScenarioPlanSeed(1, "a"), ScenarioPlanSeed(2, "a"));
}

}  // namespace
}  // namespace anchorplan
