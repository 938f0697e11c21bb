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


#include "anchorplan/planner.h"

#include <stdexcept>

#include "anchorplan/rng.h"

namespace anchorplan {

void PlannerConfig::Validate() const {
  if (T < 1) throw std::invalid_argument("planner: T must be >= 1");
  if (t_trunc < 1 || t_trunc > T) {
    throw std::invalid_argument("planner: t_trunc must lie in [1, T]");
  }
  if (steps < 0) throw std::invalid_argument("planner: steps must be >= 0");
  if (k_static < 1 || k_dynamic < 0) {
    throw std::invalid_argument("planner: anchor counts out of range");
  }
  if (!(label_sigma > 0.0)) {
    throw std::invalid_argument("planner: label_sigma must be positive");
  }
  NoiseSchedule check(T, schedule);
}

nlohmann::json ToJson(const PlannerConfig& c) {
  return {{"T", c.T},
          {"T_trunc", c.t_trunc},
          {"steps", c.steps},
          {"schedule", c.schedule},
          {"K_s", c.k_static},
          {"K_d", c.k_dynamic},
          {"label_sigma", c.label_sigma},
          {"seed", c.seed}};
}

PlannerConfig PlannerConfigFromJson(const nlohmann::json& j) {
  PlannerConfig c;
  c.T = j.value("T", c.T);
  c.t_trunc = j.value("T_trunc", c.t_trunc);
  c.steps = j.value("steps", c.steps);
  c.schedule = j.value("schedule", c.schedule);
  c.k_static = j.value("K_s", c.k_static);
  c.k_dynamic = j.value("K_d", c.k_dynamic);
  c.label_sigma = j.value("label_sigma", c.label_sigma);
  c.seed = j.value("seed", c.seed);
  c.Validate();
  return c;
}

std::string_view InitModeName(InitMode m) {
  switch (m) {
    case InitMode::kHybrid:
      return "hybrid";
    case InitMode::kStaticOnly:
      return "static";
    case InitMode::kNoise:
      return "noise";
  }
  return "hybrid";
}

InitMode InitModeFromName(std::string_view name) {
  if (name == "hybrid" || name == "anchors") return InitMode::kHybrid;
  if (name == "static") return InitMode::kStaticOnly;
  if (name == "noise") return InitMode::kNoise;
  throw std::invalid_argument("unknown init mode '" + std::string(name) + "'");
}

Tensor2 ModelPredictor::PredictNoise(const Tensor2& residual_t,
                                     const Tensor2& anchors, int t) const {
  Graph g;
  const Var ctx = g.Input(context_);
  const std::vector<int> ts(residual_t.rows(), t);
  return g.value(model_.PredictNoise(g, residual_t, anchors, ts, ctx));
}

std::vector<double> ModelPredictor::Score(const Tensor2& candidates) const {
  Graph g;
  return g.value(model_.Confidence(g, candidates, g.Input(context_),
                                   g.Input(tokens_)))
      .data();
}

int ArgmaxLowest(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("argmax of empty vector");
  int best = 0;
  for (size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = static_cast<int>(i);
  }
  return best;
}

Tensor2 StackAnchors(const std::vector<FlatTrajectory>& anchors) {
  const int d = anchors.empty() ? 0 : int(anchors[0].values.size());
  Tensor2 out(static_cast<int>(anchors.size()), d);
  for (size_t r = 0; r < anchors.size(); ++r) {
    if (int(anchors[r].values.size()) != d) {
      throw HorizonMismatch("anchors have differing horizons");
    }
    std::copy(anchors[r].values.begin(), anchors[r].values.end(),
              out.row(int(r)).begin());
  }
  return out;
}

std::vector<FlatTrajectory> RefineResiduals(const Tensor2& anchors,
                                            Tensor2 residual,
                                            const NoisePredictor& predictor,
                                            const NoiseSchedule& schedule,
                                            int t_start, int steps) {
  const std::vector<int> ts = ReverseTimesteps(t_start, steps);
  for (size_t k = 0; k + 1 < ts.size(); ++k) {
    const Tensor2 eps = predictor.PredictNoise(residual, anchors, ts[k]);
    if (!eps.SameShape(residual)) {
      throw ShapeError("noise predictor returned " + eps.ShapeString());
    }
    for (int r = 0; r < residual.rows(); ++r) {
      const std::vector<double> next =
          ReverseStep(residual.row(r), ts[k], ts[k + 1], eps.row(r), schedule);
      std::copy(next.begin(), next.end(), residual.row(r).begin());
    }
  }
  std::vector<FlatTrajectory> out;
  for (int r = 0; r < anchors.rows(); ++r) {
    std::vector<double> v(anchors.cols());
    for (int j = 0; j < anchors.cols(); ++j) v[j] = anchors(r, j) + residual(r, j);
    out.emplace_back(std::move(v));
  }
  return out;
}

PlanResult TruncatedSample(const AnchorSet& anchors,
                           const NoisePredictor& predictor,
                           const NoiseSchedule& schedule, int t_start,
                           int steps, uint64_t seed, double dt) {
  if (anchors.empty()) throw std::invalid_argument("sample: empty anchor set");
  if (steps < 0) throw std::invalid_argument("sample: negative steps");
  PlanResult result;
  if (steps == 0) {
    result.candidates = anchors.anchors;
  } else {
    const Tensor2 a = StackAnchors(anchors.anchors);
    Rng rng(seed);
    Tensor2 residual(a.rows(), a.cols());
    const double s = std::sqrt(1.0 - schedule.AlphaBar(t_start));
    for (size_t i = 0; i < residual.size(); ++i) residual[i] = s * rng.Normal();
    result.candidates =
        RefineResiduals(a, std::move(residual), predictor, schedule, t_start,
                        steps);
  }
  result.confidences = predictor.Score(StackAnchors(result.candidates));
  if (result.confidences.size() != result.candidates.size()) {
    throw ShapeError("confidence count differs from candidate count");
  }
  result.selected = ArgmaxLowest(result.confidences);
  result.provenance = anchors.provenance[result.selected];
  result.trajectory = Unflatten(result.candidates[result.selected], dt);
  return result;
}

Planner::Planner(const DecoderModel& decoder, const DenoiserModel& denoiser,
                 const StaticVocabulary& vocab, const PlannerConfig& cfg)
    : decoder_(decoder),
      denoiser_(denoiser),
      vocab_(vocab),
      cfg_(cfg),
      schedule_(cfg.T, cfg.schedule) {
  cfg_.Validate();
  if (denoiser.config().T != cfg.T ||
      denoiser.config().schedule != cfg.schedule) {
    throw std::invalid_argument(
        "planner: schedule differs from the one the denoiser was built with");
  }
}

AnchorSet Planner::Anchors(const PerceptionBundle& p, InitMode mode) const {
  switch (mode) {
    case InitMode::kHybrid:
      return Fuse(vocab_, decoder_.Anchors(p, mask_), FuseMode::kHybrid,
                  decoder_.config().queries);
    case InitMode::kStaticOnly:
      return Fuse(vocab_, {}, FuseMode::kStaticOnly);
    case InitMode::kNoise: {
      AnchorSet set;
      const int n = cfg_.k_static + cfg_.k_dynamic;
      const int h = decoder_.config().horizon;
      set.anchors.assign(n, FlatTrajectory(h));
      set.provenance.assign(n, AnchorSource::kStatic);
      return set;
    }
  }
  throw std::invalid_argument("unknown init mode");
}

PlanResult Planner::Plan(const PerceptionBundle& p, InitMode mode, int steps,
                         uint64_t seed) const {
  Graph g;
  const Var tokens = decoder_.Encode(g, p, mask_);
  const ModelPredictor predictor(
      denoiser_, g.value(denoiser_.Context(g, tokens)), g.value(tokens));
  const int t_start = mode == InitMode::kNoise ? cfg_.T : cfg_.t_trunc;
  AnchorSet anchors;
  if (mode == InitMode::kHybrid) {
    std::vector<FlatTrajectory> dynamic;
    for (Var v : decoder_.DecodeAnchors(g, tokens)) {
      dynamic.push_back(RowToTrajectory(g.value(v)));
    }
    anchors = Fuse(vocab_, dynamic, FuseMode::kHybrid,
                   decoder_.config().queries);
  } else {
    anchors = Anchors(p, mode);
  }
  return TruncatedSample(anchors, predictor, schedule_, t_start, steps, seed);
}

}  // namespace anchorplan
