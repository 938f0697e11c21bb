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

#include "anchorplan/layers.h"

#include <cmath>

namespace anchorplan {

Parameter* ParameterStore::CreateXavier(const std::string& name, int rows,
                                        int cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / (rows + cols));
  Tensor2 value(rows, cols);
  for (size_t i = 0; i < value.size(); ++i) {
    value[i] = rng.Uniform(-limit, limit);
  }
  params_.emplace_back(name, std::move(value));
  return &params_.back();
}

Parameter* ParameterStore::CreateConstant(const std::string& name, int rows,
                                          int cols, double value) {
  params_.emplace_back(name, Tensor2(rows, cols, value));
  return &params_.back();
}

Parameter* ParameterStore::CreateNormal(const std::string& name, int rows,
                                        int cols, double stddev, Rng& rng) {
  Tensor2 value(rows, cols);
  for (size_t i = 0; i < value.size(); ++i) value[i] = stddev * rng.Normal();
  params_.emplace_back(name, std::move(value));
  return &params_.back();
}

std::vector<Parameter*> ParameterStore::All() {
  std::vector<Parameter*> out;
  for (Parameter& p : params_) out.push_back(&p);
  return out;
}

std::vector<const Parameter*> ParameterStore::All() const {
  std::vector<const Parameter*> out;
  for (const Parameter& p : params_) out.push_back(&p);
  return out;
}

Parameter* ParameterStore::Find(const std::string& name) {
  for (Parameter& p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

size_t ParameterStore::ScalarCount() const {
  size_t n = 0;
  for (const Parameter& p : params_) n += p.value.size();
  return n;
}

void ParameterStore::ZeroGrad() {
  for (Parameter& p : params_) p.ZeroGrad();
}

Linear::Linear(ParameterStore& store, const std::string& name, int in, int out,
               Rng& rng)
    : weight(store.CreateXavier(name + ".w", in, out, rng)),
      bias(store.CreateConstant(name + ".b", 1, out, 0.0)) {}

Var Linear::Forward(Graph& g, Var x) const {
  return g.AddBias(g.MatMul(x, g.Param(*weight)), g.Param(*bias));
}

Mlp::Mlp(ParameterStore& store, const std::string& name,
         const std::vector<int>& widths, Rng& rng) {
  for (size_t i = 0; i + 1 < widths.size(); ++i) {
    layers.emplace_back(store, name + "." + std::to_string(i), widths[i],
                        widths[i + 1], rng);
  }
}

Var Mlp::Forward(Graph& g, Var x) const {
  for (size_t i = 0; i < layers.size(); ++i) {
    x = layers[i].Forward(g, x);
    if (i + 1 < layers.size()) x = g.Relu(x);
  }
  return x;
}

Var ScaledDotAttention(Graph& g, Var q, Var k, Var v, int heads,
                       std::vector<Var>* weights) {
  const int width = g.value(q).cols();
  if (heads <= 0 || width % heads != 0 || g.value(k).cols() != width ||
      g.value(v).cols() != width || g.value(k).rows() != g.value(v).rows()) {
    throw ShapeError("attention: widths must match and divide by heads");
  }
  const int d = width / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<Var> outs;
  for (int h = 0; h < heads; ++h) {
    const Var qh = g.SliceCols(q, h * d, d);
    const Var kh = g.SliceCols(k, h * d, d);
    const Var vh = g.SliceCols(v, h * d, d);
    const Var scores = g.Scale(g.MatMul(qh, g.Transpose(kh)), scale);
    const Var w = g.SoftmaxRows(scores);
    if (weights != nullptr) weights->push_back(w);
    outs.push_back(g.MatMul(w, vh));
  }
  return heads == 1 ? outs[0] : g.ConcatCols(outs);
}

MultiHeadAttention::MultiHeadAttention(ParameterStore& store,
                                       const std::string& name, int width,
                                       int num_heads, Rng& rng)
    : heads(num_heads),
      wq(store.CreateXavier(name + ".wq", width, width, rng)),
      wk(store.CreateXavier(name + ".wk", width, width, rng)),
      wv(store.CreateXavier(name + ".wv", width, width, rng)),
      out(store, name + ".out", width, width, rng) {}

Var MultiHeadAttention::Forward(Graph& g, Var queries, Var tokens,
                                std::vector<Var>* weights) const {
  const Var q = g.MatMul(queries, g.Param(*wq));
  const Var k = g.MatMul(tokens, g.Param(*wk));
  const Var v = g.MatMul(tokens, g.Param(*wv));
  return out.Forward(g, ScaledDotAttention(g, q, k, v, heads, weights));
}

LayerNormParams::LayerNormParams(ParameterStore& store, const std::string& name,
                                 int width)
    : gamma(store.CreateConstant(name + ".gamma", 1, width, 1.0)),
      beta(store.CreateConstant(name + ".beta", 1, width, 0.0)) {}

Var LayerNormParams::Forward(Graph& g, Var x) const {
  return g.LayerNorm(x, g.Param(*gamma), g.Param(*beta));
}

}  // namespace anchorplan
