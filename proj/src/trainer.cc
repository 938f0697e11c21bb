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


#include "anchorplan/trainer.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <numeric>
#include <unordered_map>

#include "anchorplan/rng.h"

namespace anchorplan {

PlannerModels::PlannerModels(const DecoderConfig& dc, const DenoiserConfig& nc,
                             uint64_t seed)
    : decoder(dc, MixSeed(seed, 1)), denoiser(nc, MixSeed(seed, 2)) {
  if (nc.context != dc.embed || nc.horizon != dc.horizon) {
    throw ShapeError("denoiser context/horizon must match the decoder");
  }
}

std::vector<Parameter*> PlannerModels::AllParameters() {
  std::vector<Parameter*> out = decoder.params().All();
  for (Parameter* p : denoiser.params().All()) out.push_back(p);
  return out;
}

std::vector<Parameter*> PlannerModels::TrainableParameters() {
  std::vector<Parameter*> out;
  for (Parameter* p : AllParameters()) {
    if (p->trainable) out.push_back(p);
  }
  return out;
}

size_t PlannerModels::ScalarCount() const {
  return decoder.params().ScalarCount() + denoiser.params().ScalarCount();
}

Tensor2 ResidualCovariance(const std::vector<std::vector<double>>& residuals,
                           double ridge) {
  if (residuals.empty()) throw std::invalid_argument("covariance: no rows");
  const int d = static_cast<int>(residuals[0].size());
  const double n = static_cast<double>(residuals.size());
  Tensor2 cov(d, d);
  for (const auto& r : residuals) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) cov(i, j) += r[i] * r[j] / n;
    }
  }
  for (int i = 0; i < d; ++i) cov(i, i) += ridge;
  return cov;
}

Tensor2 EstimateResidualCovariance(const std::vector<TrainExample>& data,
                                   const StaticVocabulary& vocab,
                                   double ridge) {
  std::vector<std::vector<double>> res;
  for (const TrainExample& ex : data) {
    const FlatTrajectory& a =
        vocab.anchors[NearestAnchor(ex.expert, vocab.anchors).index];
    std::vector<double> r(ex.expert.values.size());
    for (size_t j = 0; j < r.size(); ++j) r[j] = ex.expert.values[j] - a.values[j];
    res.push_back(std::move(r));
  }
  return ResidualCovariance(res, ridge);
}

Tensor2 SoftLabels(const std::vector<FlatTrajectory>& candidates,
                   const FlatTrajectory& expert, double sigma) {
  const int m = static_cast<int>(candidates.size());
  std::vector<double> a(m);
  for (int i = 0; i < m; ++i) a[i] = Ade(candidates[i], expert) / sigma;
  const double lo = *std::min_element(a.begin(), a.end());
  Tensor2 out(m, 1);
  double z = 0.0;
  for (int i = 0; i < m; ++i) z += (out[i] = std::exp(-(a[i] - lo)));
  for (int i = 0; i < m; ++i) out[i] /= z;
  return out;
}

Var SampleLoss(Graph& g, const PlannerModels& models,
               const StaticVocabulary& vocab, const PlannerConfig& pc,
               const NoiseSchedule& schedule, const TrainExample& ex,
               FrozenDraws& draws, Rng& rng, double gamma, LossParts* parts) {
  const DecoderModel& dec = models.decoder;
  const DenoiserModel& den = models.denoiser;
  const Var tokens = dec.Encode(g, ex.bundle, draws.mask);
  const std::vector<Var> dynamic = dec.DecodeAnchors(g, tokens);
  const Var context = den.Context(g, tokens);

  if (!draws.ready) {
    std::vector<FlatTrajectory> dyn_values;
    for (Var v : dynamic) dyn_values.push_back(RowToTrajectory(g.value(v)));
    draws.anchors =
        dynamic.empty()
            ? Fuse(vocab, {}, FuseMode::kStaticOnly)
            : Fuse(vocab, dyn_values, FuseMode::kHybrid, int(dynamic.size()));
    draws.nearest = NearestAnchor(ex.expert, draws.anchors).index;
    draws.t = 1 + static_cast<int>(rng.UniformInt(pc.t_trunc));
    draws.eps.resize(ex.expert.values.size());
    for (double& e : draws.eps) e = rng.Normal();

    const Tensor2 a = StackAnchors(draws.anchors.anchors);
    Tensor2 r0(a.rows(), a.cols());
    const double s = std::sqrt(1.0 - schedule.AlphaBar(pc.t_trunc));
    for (size_t i = 0; i < r0.size(); ++i) r0[i] = s * rng.Normal();
    const ModelPredictor predictor(den, g.value(context), g.value(tokens));
    const std::vector<FlatTrajectory> cands = RefineResiduals(
        a, std::move(r0), predictor, schedule, pc.t_trunc, pc.steps);
    draws.candidates = StackAnchors(cands);
    draws.labels = SoftLabels(cands, ex.expert, pc.label_sigma);
    draws.ready = true;
  }

  const FlatTrajectory& anchor = draws.anchors.anchors[draws.nearest];
  const int d = static_cast<int>(anchor.values.size());
  std::vector<double> residual(d);
  for (int j = 0; j < d; ++j) residual[j] = ex.expert.values[j] - anchor.values[j];
  const std::vector<double> r_t =
      ForwardNoise(residual, draws.t, draws.eps, schedule);

  const Var eps_hat = den.PredictNoise(g, Tensor2(1, d, r_t),
                                       Tensor2(1, d, anchor.values),
                                       {draws.t}, context);
  const Var noise_loss = g.Mse(eps_hat, g.Input(Tensor2(1, d, draws.eps)));
  const Var logits = den.Confidence(g, draws.candidates, context, tokens);
  const Var conf_loss = g.BceWithLogits(logits, draws.labels);
  Var total = g.Add(noise_loss, conf_loss);
  double dec_value = 0.0;
  if (!dynamic.empty()) {
    const Var dec_loss = DecoderLoss(g, dynamic, ex.expert, gamma);
    dec_value = g.value(dec_loss)[0];
    total = g.Add(total, dec_loss);
  }
  if (parts != nullptr) {
    parts->decoder = dec_value;
    parts->noise = g.value(noise_loss)[0];
    parts->confidence = g.value(conf_loss)[0];
    parts->total = g.value(total)[0];
  }
  return total;
}

double LearningRate(const TrainConfig& tc, int step, int warmup_steps,
                    int total_steps) {
  if (step < warmup_steps) return tc.lr * (step + 1) / warmup_steps;
  const double progress =
      double(step - warmup_steps) / std::max(1, total_steps - warmup_steps);
  return tc.lr_final + 0.5 * (tc.lr - tc.lr_final) *
                           (1.0 + std::cos(std::numbers::pi * progress));
}

TrainHistory Train(PlannerModels& models, const StaticVocabulary& vocab,
                   const PlannerConfig& pc,
                   const std::vector<TrainExample>& data,
                   const TrainConfig& tc, const EpochCallback& on_epoch) {
  if (data.empty()) throw std::invalid_argument("train: empty dataset");
  if (tc.batch_size < 1 || tc.epochs < 0) {
    throw std::invalid_argument("train: batch_size and epochs out of range");
  }
  const NoiseSchedule schedule(pc.T, pc.schedule);
  models.denoiser.SetResidualPrior(EstimateResidualCovariance(data, vocab));
  std::vector<Parameter*> params = models.TrainableParameters();
  std::unordered_map<const Parameter*, size_t> index;
  for (size_t i = 0; i < params.size(); ++i) index[params[i]] = i;

  AdamConfig adam_cfg;
  adam_cfg.lr = tc.lr;
  AdamState adam_state;
  int step = 0;
  const int n = static_cast<int>(data.size());
  const int batches_per_epoch = (n + tc.batch_size - 1) / tc.batch_size;
  const int total_steps = std::max(1, batches_per_epoch * tc.epochs);
  const int warmup_steps =
      std::min(total_steps - 1, batches_per_epoch * std::max(0, tc.warmup_epochs));

  TrainHistory history;
  Rng shuffle_rng(MixSeed(tc.seed, 0x5eed));
  std::vector<int> order(n);
  for (int epoch = 0; epoch < tc.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    for (int i = n - 1; i > 0; --i) {
      std::swap(order[i], order[shuffle_rng.UniformInt(i + 1)]);
    }
    LossParts sum;
    std::vector<std::vector<double>> residuals(n);
    for (int b0 = 0; b0 < n; b0 += tc.batch_size) {
      const int bn = std::min(tc.batch_size, n - b0);
      std::vector<std::vector<Tensor2>> grads(bn);
      std::vector<LossParts> parts(bn);
      std::vector<std::exception_ptr> errors(bn);
#pragma omp parallel for schedule(dynamic)
      for (int k = 0; k < bn; ++k) {
        try {
          const int sample = order[b0 + k];
          Rng rng(MixSeed(tc.seed, uint64_t(epoch) * n + sample + 1));
          FrozenDraws draws;
          if (tc.stream_dropout) {
            draws.mask = StreamMask::Cumulative(
                static_cast<int>(rng.UniformInt(kNumMaskLevels)));
          }
          Graph g;
          const Var loss = SampleLoss(g, models, vocab, pc, schedule,
                                      data[sample], draws, rng, tc.gamma,
                                      &parts[k]);
          const FlatTrajectory& a = draws.anchors.anchors[draws.nearest];
          std::vector<double>& r = residuals[b0 + k];
          r.resize(a.values.size());
          for (size_t j = 0; j < r.size(); ++j) {
            r[j] = data[sample].expert.values[j] - a.values[j];
          }
          if (!std::isfinite(parts[k].total)) {
            throw NumericError("non-finite training loss");
          }
          g.Backward(loss);
          std::vector<Tensor2>& local = grads[k];
          local.resize(params.size());
          for (const auto& [p, grad] : g.ParameterGradients()) {
            const auto it = index.find(p);
            if (it == index.end()) continue;
            Tensor2& dst = local[it->second];
            if (dst.empty()) {
              dst = *grad;
            } else {
              dst.AddInPlace(*grad);
            }
          }
        } catch (...) {
          errors[k] = std::current_exception();
        }
      }
      for (const std::exception_ptr& e : errors) {
        if (e) std::rethrow_exception(e);
      }
      for (Parameter* p : params) p->ZeroGrad();
      for (int k = 0; k < bn; ++k) {
        for (size_t i = 0; i < params.size(); ++i) {
          if (!grads[k][i].empty()) params[i]->grad.AddInPlace(grads[k][i]);
        }
        sum.decoder += parts[k].decoder;
        sum.noise += parts[k].noise;
        sum.confidence += parts[k].confidence;
        sum.total += parts[k].total;
      }
      double norm2 = 0.0;
      for (Parameter* p : params) {
        for (double& v : p->grad.data()) {
          v /= bn;
          norm2 += v * v;
        }
      }
      if (tc.grad_clip > 0.0 && norm2 > tc.grad_clip * tc.grad_clip) {
        const double s = tc.grad_clip / std::sqrt(norm2);
        for (Parameter* p : params) {
          for (double& v : p->grad.data()) v *= s;
        }
      }
      adam_cfg.lr = LearningRate(tc, step, warmup_steps, total_steps);
      AdamStep(params, adam_state, adam_cfg, ++step);
    }
    LossParts mean{sum.decoder / n, sum.noise / n, sum.confidence / n,
                   sum.total / n};
    history.epochs.push_back(mean);
    models.denoiser.SetResidualPrior(ResidualCovariance(residuals));
    if (on_epoch) on_epoch(epoch, mean);
  }
  return history;
}

}  // namespace anchorplan
