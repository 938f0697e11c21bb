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


#include "anchorplan/denoiser.h"

#include <cmath>
#include <map>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace anchorplan {

std::vector<double> TimeEmbedding(int t, int dim) {
  const int half = dim / 2;
  std::vector<double> out(dim, 0.0);
  for (int i = 0; i < half; ++i) {
    const double w = std::pow(10000.0, -double(i) / half);
    out[i] = std::sin(t * w);
    out[half + i] = std::cos(t * w);
  }
  return out;
}

namespace {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::RowMajor>;

// Scale of the learned correction's output layer at initialization, so the
// Gaussian estimate dominates early training.
constexpr double kCorrectionInitScale = 0.1;

}  // namespace

DenoiserModel::DenoiserModel(const DenoiserConfig& cfg, uint64_t seed)
    : cfg_(cfg), schedule_(cfg.T, cfg.schedule) {
  if (cfg_.context % cfg_.heads != 0 || cfg_.time_dim % 2 != 0) {
    throw ShapeError("denoiser: context must divide by heads, time_dim even");
  }
  Rng rng(seed);
  residual_prior_ = store_.CreateConstant("denoiser/residual_prior",
                                          cfg_.traj_dim(), cfg_.traj_dim(), 0.0);
  residual_prior_->value = Tensor2::Identity(cfg_.traj_dim());
  residual_prior_->trainable = false;
  pool_query_ =
      store_.CreateNormal("denoiser/pool_query", 1, cfg_.context, 1.0, rng);
  pool_ = MultiHeadAttention(store_, "denoiser/pool", cfg_.context, cfg_.heads,
                             rng);
  noise_mlp_ = Mlp(store_, "denoiser/mlp",
                   {cfg_.input_dim(), cfg_.hidden, cfg_.hidden, cfg_.traj_dim()},
                   rng);
  for (double& w : noise_mlp_.layers.back().weight->value.data()) {
    w *= kCorrectionInitScale;
  }
  candidate_proj_ = Linear(store_, "confidence/candidate_proj",
                           cfg_.traj_dim(), cfg_.context, rng);
  candidate_attn_ = MultiHeadAttention(store_, "confidence/attn", cfg_.context,
                                       cfg_.heads, rng);
  confidence_mlp_ =
      Mlp(store_, "confidence/mlp",
          {cfg_.traj_dim() + 2 * cfg_.context, cfg_.confidence_hidden, 1}, rng);
}

void DenoiserModel::SetResidualPrior(const Tensor2& cov) {
  if (!cov.SameShape(residual_prior_->value) || !cov.AllFinite()) {
    throw ShapeError("denoiser: residual prior must be a finite " +
                     residual_prior_->value.ShapeString() + " matrix");
  }
  residual_prior_->value = cov;
}

Tensor2 DenoiserModel::GaussianNoiseEstimate(const Tensor2& residual_t,
                                             int t) const {
  const int d = cfg_.traj_dim();
  const double ab = schedule_.AlphaBar(t);
  const double sigma = std::sqrt(1.0 - ab);
  Tensor2 out(residual_t.rows(), d);
  if (sigma == 0.0) return out;
  const Eigen::Map<const Matrix> cov(residual_prior_->value.data().data(), d, d);
  const Matrix system =
      ab * cov + sigma * sigma * Matrix::Identity(d, d);
  const Eigen::LLT<Matrix> llt(system);
  if (llt.info() != Eigen::Success) {
    throw NumericError("denoiser: residual prior is not positive definite");
  }
  const Eigen::Map<const Matrix> rhs(residual_t.data().data(),
                                     residual_t.rows(), d);
  const Matrix solved = llt.solve(rhs.transpose()).transpose() * sigma;
  Eigen::Map<Matrix>(out.data().data(), residual_t.rows(), d) = solved;
  return out;
}

Var DenoiserModel::Context(Graph& g, Var tokens) const {
  return pool_.Forward(g, g.Param(*pool_query_), tokens);
}

Var DenoiserModel::Broadcast(Graph& g, Var row, int m) const {
  return m == 1 ? row : g.MatMul(g.Input(Tensor2(m, 1, 1.0)), row);
}

Var DenoiserModel::PredictNoise(Graph& g, const Tensor2& residual_t,
                                const Tensor2& anchors,
                                const std::vector<int>& t,
                                Var context) const {
  const int m = residual_t.rows();
  const int d = cfg_.traj_dim();
  if (residual_t.cols() != d || !anchors.SameShape(residual_t) ||
      static_cast<int>(t.size()) != m) {
    throw ShapeError("denoiser: input shapes disagree");
  }
  // Group rows by level so each Gaussian solve runs once per distinct t.
  std::map<int, std::vector<int>> by_t;
  for (int r = 0; r < m; ++r) by_t[t[r]].push_back(r);
  Tensor2 base(m, d);
  std::vector<double> in_scale(m);
  const double prior_var = [&] {
    double tr = 0.0;
    for (int j = 0; j < d; ++j) tr += residual_prior_->value(j, j);
    return tr / d;
  }();
  for (const auto& [level, rows] : by_t) {
    Tensor2 group(static_cast<int>(rows.size()), d);
    for (size_t k = 0; k < rows.size(); ++k) {
      for (int j = 0; j < d; ++j) group(int(k), j) = residual_t(rows[k], j);
    }
    const Tensor2 est = GaussianNoiseEstimate(group, level);
    const double ab = schedule_.AlphaBar(level);
    const double scale = 1.0 / std::sqrt(ab * prior_var + (1.0 - ab));
    for (size_t k = 0; k < rows.size(); ++k) {
      for (int j = 0; j < d; ++j) base(rows[k], j) = est(int(k), j);
      in_scale[rows[k]] = scale;
    }
  }

  const int fixed = 2 * d + cfg_.time_dim;
  Tensor2 x(m, fixed);
  for (int r = 0; r < m; ++r) {
    for (int j = 0; j < d; ++j) {
      x(r, j) = residual_t(r, j) * in_scale[r];
      x(r, d + j) = anchors(r, j) / cfg_.anchor_scale;
    }
    const std::vector<double> emb = TimeEmbedding(t[r], cfg_.time_dim);
    for (int j = 0; j < cfg_.time_dim; ++j) x(r, 2 * d + j) = emb[j];
  }
  const Var in = g.ConcatCols({g.Input(std::move(x)), Broadcast(g, context, m)});
  return g.Add(g.Input(std::move(base)), noise_mlp_.Forward(g, in));
}

Var DenoiserModel::Confidence(Graph& g, const Tensor2& candidates,
                              Var context, Var tokens) const {
  const int m = candidates.rows();
  if (candidates.cols() != cfg_.traj_dim()) {
    throw ShapeError("confidence: candidate width mismatch");
  }
  Tensor2 x(m, candidates.cols());
  for (size_t i = 0; i < x.size(); ++i) {
    x[i] = candidates[i] / cfg_.anchor_scale;
  }
  const Var cand = g.Input(std::move(x));
  const Var query =
      g.AddBias(candidate_proj_.Forward(g, cand), context);
  const Var attended = candidate_attn_.Forward(g, query, tokens);
  return confidence_mlp_.Forward(
      g, g.ConcatCols({cand, attended, Broadcast(g, context, m)}));
}

}  // namespace anchorplan
