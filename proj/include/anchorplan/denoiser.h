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


#ifndef ANCHORPLAN_DENOISER_H_
#define ANCHORPLAN_DENOISER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "anchorplan/graph.h"
#include "anchorplan/layers.h"
#include "anchorplan/noise_schedule.h"
#include "anchorplan/trajectory.h"

namespace anchorplan {

struct DenoiserConfig {
  int horizon = kDefaultHorizon;
  int context = 32;  // must equal the decoder embed width
  int heads = 4;
  int time_dim = 16;
  int hidden = 128;
  int confidence_hidden = 64;
  double anchor_scale = 10.0;  // anchors and candidates enter divided by this
  int T = 100;
  std::string schedule = "cosine";

  int traj_dim() const { return 2 * horizon; }
  int input_dim() const { return 2 * traj_dim() + time_dim + context; }
};

// Sinusoidal embedding: (sin(t w_i), cos(t w_i)) with w_i = 10000^(-i/half).
std::vector<double> TimeEmbedding(int t, int dim);

// Noise predictor eps_theta(x_t, t, z) plus the per-candidate confidence
// head. Parameter names are prefixed "denoiser/" and "confidence/".
//
// The predictor is preconditioned: eps_hat = G_t r_t + F(...), where
// G_t = sigma_t (ab_t S + sigma_t^2 I)^-1 is the exact noise posterior mean
// for a Gaussian residual prior N(0, S), and F is the learned correction.
// S is a checkpointed buffer estimated from the training corpus.
class DenoiserModel {
 public:
  DenoiserModel(const DenoiserConfig& cfg, uint64_t seed);
  DenoiserModel(DenoiserModel&&) = default;

  const DenoiserConfig& config() const { return cfg_; }
  ParameterStore& params() { return store_; }
  const ParameterStore& params() const { return store_; }

  const NoiseSchedule& schedule() const { return schedule_; }

  // Residual prior covariance S (2H x 2H, symmetric positive definite).
  void SetResidualPrior(const Tensor2& cov);
  const Tensor2& residual_prior() const { return residual_prior_->value; }

  // G_t r for each row r of `residual_t` at level t.
  Tensor2 GaussianNoiseEstimate(const Tensor2& residual_t, int t) const;

  // Attention pooling of encoder tokens with a learned query -> 1 x context.
  Var Context(Graph& g, Var tokens) const;

  // Rows are candidates: residual r_t = x_t - anchor (m x 2H), the anchors
  // (m x 2H) and per-row levels t. Returns predicted noise, m x 2H.
  Var PredictNoise(Graph& g, const Tensor2& residual_t, const Tensor2& anchors,
                   const std::vector<int>& t, Var context) const;

  // Logit per candidate trajectory (m x 2H) -> m x 1. Each candidate
  // embedding, offset by the context, cross-attends to the scene tokens.
  Var Confidence(Graph& g, const Tensor2& candidates, Var context,
                 Var tokens) const;

 private:
  Var Broadcast(Graph& g, Var row, int m) const;

  DenoiserConfig cfg_;
  NoiseSchedule schedule_;
  ParameterStore store_;
  Parameter* residual_prior_ = nullptr;
  Parameter* pool_query_ = nullptr;
  MultiHeadAttention pool_;
  Mlp noise_mlp_;
  Linear candidate_proj_;
  MultiHeadAttention candidate_attn_;
  Mlp confidence_mlp_;
};

}  // namespace anchorplan

#endif  // ANCHORPLAN_DENOISER_H_
