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

#ifndef ANCHORPLAN_LAYERS_H_
#define ANCHORPLAN_LAYERS_H_

#include <deque>
#include <string>
#include <vector>

#include "anchorplan/graph.h"
#include "anchorplan/rng.h"

namespace anchorplan {

// Owns parameters at stable addresses. Movable, not copyable.
class ParameterStore {
 public:
  ParameterStore() = default;
  ParameterStore(ParameterStore&&) = default;
  ParameterStore& operator=(ParameterStore&&) = default;
  ParameterStore(const ParameterStore&) = delete;
  ParameterStore& operator=(const ParameterStore&) = delete;

  // Xavier-uniform weights.
  Parameter* CreateXavier(const std::string& name, int rows, int cols,
                          Rng& rng);
  Parameter* CreateConstant(const std::string& name, int rows, int cols,
                            double value);
  Parameter* CreateNormal(const std::string& name, int rows, int cols,
                          double stddev, Rng& rng);

  std::vector<Parameter*> All();
  std::vector<const Parameter*> All() const;
  Parameter* Find(const std::string& name);
  size_t ScalarCount() const;
  void ZeroGrad();

 private:
  std::deque<Parameter> params_;
};

struct Linear {
  Parameter* weight = nullptr;  // in x out
  Parameter* bias = nullptr;    // 1 x out

  Linear() = default;
  Linear(ParameterStore& store, const std::string& name, int in, int out,
         Rng& rng);
  Var Forward(Graph& g, Var x) const;
};

// Linear -> ReLU -> ... -> Linear.
struct Mlp {
  std::vector<Linear> layers;

  Mlp() = default;
  Mlp(ParameterStore& store, const std::string& name,
      const std::vector<int>& widths, Rng& rng);
  Var Forward(Graph& g, Var x) const;
};

// Per-head softmax(Q_h K_h^T / sqrt(d_head)) V_h, heads concatenated (no
// output projection). Optionally returns each head's weight matrix.
Var ScaledDotAttention(Graph& g, Var q, Var k, Var v, int heads,
                       std::vector<Var>* weights = nullptr);

struct MultiHeadAttention {
  int heads = 1;
  Parameter* wq = nullptr;
  Parameter* wk = nullptr;
  Parameter* wv = nullptr;
  Linear out;

  MultiHeadAttention() = default;
  MultiHeadAttention(ParameterStore& store, const std::string& name,
                     int width, int heads, Rng& rng);
  // queries (m x D) attend over tokens (n x D) -> m x D.
  Var Forward(Graph& g, Var queries, Var tokens,
              std::vector<Var>* weights = nullptr) const;
};

struct LayerNormParams {
  Parameter* gamma = nullptr;
  Parameter* beta = nullptr;

  LayerNormParams() = default;
  LayerNormParams(ParameterStore& store, const std::string& name, int width);
  Var Forward(Graph& g, Var x) const;
};

}  // namespace anchorplan

#endif  // ANCHORPLAN_LAYERS_H_
