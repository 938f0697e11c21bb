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

#ifndef ANCHORPLAN_GRAPH_H_
#define ANCHORPLAN_GRAPH_H_

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "anchorplan/tensor.h"

namespace anchorplan {

// A trainable tensor and its accumulated gradient.
struct Parameter {
  std::string name;
  Tensor2 value;
  Tensor2 grad;
  // Buffers (checkpointed, never optimized) set this to false.
  bool trainable = true;

  Parameter() = default;
  Parameter(std::string n, Tensor2 v);
  void ZeroGrad() { grad.Fill(0.0); }
};

// Handle to a node of a Graph.
struct Var {
  int id = -1;
};

// Tape of recorded ops. Nodes are appended in evaluation order, which is a
// topological order; Backward walks it in reverse. One graph per forward
// pass, single-threaded.
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var Input(Tensor2 value);
  Var Param(Parameter& p);

  const Tensor2& value(Var v) const { return nodes_.at(v.id).value; }
  // Empty tensor if no gradient reached v.
  const Tensor2& grad(Var v) const { return nodes_.at(v.id).grad; }
  size_t size() const { return nodes_.size(); }

  Var MatMul(Var a, Var b);
  Var Add(Var a, Var b);
  Var Sub(Var a, Var b);
  Var Mul(Var a, Var b);
  // a (r x n) + bias (1 x n) broadcast over rows.
  Var AddBias(Var a, Var bias);
  Var Scale(Var a, double s);
  Var Relu(Var a);
  Var Tanh(Var a);
  // Per-row normalization, then gamma * xhat + beta (both 1 x n).
  Var LayerNorm(Var x, Var gamma, Var beta, double eps = 1e-5);
  Var SoftmaxRows(Var a);
  Var Transpose(Var a);
  Var ConcatCols(const std::vector<Var>& parts);
  Var ConcatRows(const std::vector<Var>& parts);
  Var SliceCols(Var a, int begin, int count);
  Var SliceRows(Var a, int begin, int count);
  Var Reshape(Var a, int rows, int cols);
  Var MeanRows(Var a);  // -> 1 x n
  Var Sum(Var a);       // -> 1 x 1
  Var Mean(Var a);      // -> 1 x 1
  // sqrt(sum_j a_ij^2 + eps) per row -> r x 1
  Var RowNorms(Var a, double eps = 1e-12);
  // Smallest element -> 1 x 1; gradient flows to the first minimizer.
  Var Min(Var a);
  // mean((a - b)^2) -> 1 x 1
  Var Mse(Var a, Var b);
  // Mean binary cross-entropy of sigmoid(logits) against soft targets.
  Var BceWithLogits(Var logits, const Tensor2& targets);

  // Fills node gradients of everything `loss` depends on. Throws ShapeError
  // if loss is not 1 x 1 or not part of this graph, NumericError on
  // non-finite gradients.
  void Backward(Var loss);

  // Gradients of Param leaves from the last Backward, in creation order.
  std::vector<std::pair<Parameter*, const Tensor2*>> ParameterGradients()
      const;

 private:
  using BackwardFn = std::function<void(Graph&, int self)>;
  struct Node {
    Tensor2 value;
    Tensor2 grad;
    Parameter* param = nullptr;
    bool requires_grad = false;
    BackwardFn backward;
  };

  Var Push(Tensor2 value, bool requires_grad, BackwardFn fn, const char* op);
  bool Needs(Var v) const { return nodes_[v.id].requires_grad; }
  Tensor2& GradRef(int id);
  void Check(Var v) const;

  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

// Runs g.Backward(loss) and adds every parameter gradient into
// Parameter::grad.
void Backward(Graph& g, Var loss);

}  // namespace anchorplan

#endif  // ANCHORPLAN_GRAPH_H_
