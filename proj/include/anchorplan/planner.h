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


#ifndef ANCHORPLAN_PLANNER_H_
#define ANCHORPLAN_PLANNER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "anchorplan/anchors.h"
#include "anchorplan/decoder.h"
#include "anchorplan/denoiser.h"
#include "anchorplan/kmeans.h"
#include "anchorplan/noise_schedule.h"
#include "anchorplan/perception.h"
#include "json.hpp"

namespace anchorplan {

struct PlannerConfig {
  int T = 100;
  int t_trunc = 30;
  int steps = 2;
  std::string schedule = "cosine";
  int k_static = kDefaultStaticAnchors;
  int k_dynamic = kDefaultDynamicAnchors;
  double label_sigma = 0.5;
  uint64_t seed = 0;

  // Throws std::invalid_argument on out-of-range fields.
  void Validate() const;
};

nlohmann::json ToJson(const PlannerConfig& c);
PlannerConfig PlannerConfigFromJson(const nlohmann::json& j);

// How candidates are initialized.
enum class InitMode {
  kHybrid,      // dynamic + static anchors, noised to t_trunc
  kStaticOnly,  // static anchors only
  kNoise,       // zero anchors, pure Gaussian state at t = T
};

std::string_view InitModeName(InitMode m);
InitMode InitModeFromName(std::string_view name);

// Denoiser seam; tests inject analytic oracles here.
class NoisePredictor {
 public:
  virtual ~NoisePredictor() = default;
  // Rows are candidates. Returns predicted noise with the residual's shape.
  virtual Tensor2 PredictNoise(const Tensor2& residual_t,
                               const Tensor2& anchors, int t) const = 0;
  // One confidence per candidate row.
  virtual std::vector<double> Score(const Tensor2& candidates) const = 0;
};

// Trained denoiser bound to one scene: pooled context (1 x D) and encoder
// tokens (n x D), both as values.
class ModelPredictor : public NoisePredictor {
 public:
  ModelPredictor(const DenoiserModel& model, Tensor2 context, Tensor2 tokens)
      : model_(model),
        context_(std::move(context)),
        tokens_(std::move(tokens)) {}
  Tensor2 PredictNoise(const Tensor2& residual_t, const Tensor2& anchors,
                       int t) const override;
  std::vector<double> Score(const Tensor2& candidates) const override;

 private:
  const DenoiserModel& model_;
  Tensor2 context_;
  Tensor2 tokens_;
};

struct PlanResult {
  std::vector<FlatTrajectory> candidates;
  std::vector<double> confidences;
  int selected = -1;
  AnchorSource provenance = AnchorSource::kStatic;
  Trajectory trajectory;  // selected candidate with recomputed headings
};

// Index of the largest value, ties to the lowest index.
int ArgmaxLowest(const std::vector<double>& v);

// Anchor rows stacked into an m x 2H tensor.
Tensor2 StackAnchors(const std::vector<FlatTrajectory>& anchors);

// Each anchor's zero residual is noised to level t_start with noise drawn
// from Rng(seed) in anchor order; then `steps` deterministic reverse updates
// run down to 0. Candidate = anchor + final residual. steps = 0 returns the
// anchors unchanged.
PlanResult TruncatedSample(const AnchorSet& anchors,
                           const NoisePredictor& predictor,
                           const NoiseSchedule& schedule, int t_start,
                           int steps, uint64_t seed, double dt = kDefaultDt);

// Same reverse process with caller-supplied initial residuals (m x 2H);
// returns refined candidates only.
std::vector<FlatTrajectory> RefineResiduals(const Tensor2& anchors,
                                            Tensor2 residual,
                                            const NoisePredictor& predictor,
                                            const NoiseSchedule& schedule,
                                            int t_start, int steps);

// Full inference stack: encoder, dynamic heads, vocabulary, denoiser.
class Planner {
 public:
  Planner(const DecoderModel& decoder, const DenoiserModel& denoiser,
          const StaticVocabulary& vocab, const PlannerConfig& cfg);

  const PlannerConfig& config() const { return cfg_; }
  const NoiseSchedule& schedule() const { return schedule_; }

  // Restricts the perception streams the decoder sees (ablation).
  void set_stream_mask(const StreamMask& m) { mask_ = m; }
  const StreamMask& stream_mask() const { return mask_; }

  AnchorSet Anchors(const PerceptionBundle& p, InitMode mode) const;
  PlanResult Plan(const PerceptionBundle& p, InitMode mode, int steps,
                  uint64_t seed) const;

 private:
  const DecoderModel& decoder_;
  const DenoiserModel& denoiser_;
  const StaticVocabulary& vocab_;
  PlannerConfig cfg_;
  NoiseSchedule schedule_;
  StreamMask mask_;
};

}  // namespace anchorplan

#endif  // ANCHORPLAN_PLANNER_H_
