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


#ifndef ANCHORPLAN_TRAINER_H_
#define ANCHORPLAN_TRAINER_H_

#include <cstdint>
#include <functional>
#include <vector>

#include "anchorplan/adam.h"
#include "anchorplan/anchors.h"
#include "anchorplan/decoder.h"
#include "anchorplan/denoiser.h"
#include "anchorplan/kmeans.h"
#include "anchorplan/noise_schedule.h"
#include "anchorplan/perception.h"
#include "anchorplan/planner.h"

namespace anchorplan {

// Decoder (encoder + dynamic heads) and denoiser trained jointly.
struct PlannerModels {
  DecoderModel decoder;
  DenoiserModel denoiser;

  PlannerModels(const DecoderConfig& dc, const DenoiserConfig& nc,
                uint64_t seed);

  // Every parameter, buffers included (checkpoint order).
  std::vector<Parameter*> AllParameters();
  // Parameters the optimizer updates.
  std::vector<Parameter*> TrainableParameters();
  size_t ScalarCount() const;
};

struct TrainExample {
  PerceptionBundle bundle;
  FlatTrajectory expert;
};

struct TrainConfig {
  int epochs = 20;
  int batch_size = 16;
  double lr = 2e-3;
  double lr_final = 5e-5;  // cosine decay target
  int warmup_epochs = 2;   // linear ramp from 0 before the decay
  double gamma = 0.01;     // pull term of the winner-takes-all loss
  double grad_clip = 5.0;  // global L2 norm; <= 0 disables
  // Draw a cumulative stream mask level per sample, so one model serves
  // every row of the stream ablation.
  bool stream_dropout = false;
  uint64_t seed = 0;
};

// Per-sample quantities drawn once and held fixed while the loss is
// differentiated: the hybrid anchor set (values), nearest anchor index, noise
// level and noise, refined candidates and their soft labels.
struct FrozenDraws {
  StreamMask mask;  // streams the decoder sees for this sample
  bool ready = false;
  AnchorSet anchors;
  int nearest = -1;
  int t = 0;
  std::vector<double> eps;
  Tensor2 candidates;
  Tensor2 labels;  // m x 1
};

struct LossParts {
  double decoder = 0.0;
  double noise = 0.0;
  double confidence = 0.0;
  double total = 0.0;
};

// softmin(ade(candidate_i, expert) / sigma) as an m x 1 column.
Tensor2 SoftLabels(const std::vector<FlatTrajectory>& candidates,
                   const FlatTrajectory& expert, double sigma);

// Second moment (2H x 2H) of residual rows, plus `ridge` on the diagonal.
Tensor2 ResidualCovariance(const std::vector<std::vector<double>>& residuals,
                           double ridge = 1e-4);

// ResidualCovariance of expert minus nearest static anchor over `data`.
Tensor2 EstimateResidualCovariance(const std::vector<TrainExample>& data,
                                   const StaticVocabulary& vocab,
                                   double ridge = 1e-4);

// Records the full training loss for one example. Draws are taken from `rng`
// unless `draws.ready`, in which case they are reused verbatim.
Var SampleLoss(Graph& g, const PlannerModels& models,
               const StaticVocabulary& vocab, const PlannerConfig& pc,
               const NoiseSchedule& schedule, const TrainExample& ex,
               FrozenDraws& draws, Rng& rng, double gamma,
               LossParts* parts = nullptr);

// Linear warmup over `warmup_steps`, then cosine decay to lr_final. `step`
// is 0-based.
double LearningRate(const TrainConfig& tc, int step, int warmup_steps,
                    int total_steps);

struct TrainHistory {
  std::vector<LossParts> epochs;  // mean per epoch
};

using EpochCallback = std::function<void(int epoch, const LossParts& mean)>;

// Minibatch Adam. The denoiser's residual prior starts from the static
// vocabulary residuals and is re-estimated after every epoch from the
// residuals to the nearest hybrid anchor seen in that epoch.
// Per-sample gradients are computed in parallel and summed
// in sample order, so results do not depend on the thread count. Throws
// NumericError on a non-finite loss.
TrainHistory Train(PlannerModels& models, const StaticVocabulary& vocab,
                   const PlannerConfig& pc,
                   const std::vector<TrainExample>& data,
                   const TrainConfig& tc, const EpochCallback& on_epoch = {});

}  // namespace anchorplan

#endif  // ANCHORPLAN_TRAINER_H_
