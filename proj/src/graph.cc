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

#include "anchorplan/graph.h"

#include <algorithm>
#include <cmath>

#include "anchorplan/kernels.h"

namespace anchorplan {

Parameter::Parameter(std::string n, Tensor2 v)
    : name(std::move(n)), value(std::move(v)),
      grad(value.rows(), value.cols()) {}

Var Graph::Push(Tensor2 value, bool requires_grad, BackwardFn fn,
                const char* op) {
  if (!value.AllFinite()) {
    throw NumericError(std::string(op) + ": non-finite output");
  }
  Node node;
  node.value = std::move(value);
  node.requires_grad = requires_grad;
  if (requires_grad) node.backward = std::move(fn);
  nodes_.push_back(std::move(node));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Tensor2& Graph::GradRef(int id) {
  Node& n = nodes_[id];
  if (n.grad.empty() && !n.value.empty()) {
    n.grad = Tensor2(n.value.rows(), n.value.cols());
  }
  return n.grad;
}

void Graph::Check(Var v) const {
  if (v.id < 0 || v.id >= static_cast<int>(nodes_.size())) {
    throw ShapeError("variable does not belong to this graph");
  }
}

Var Graph::Input(Tensor2 value) {
  return Push(std::move(value), false, nullptr, "input");
}

Var Graph::Param(Parameter& p) {
  Var v = Push(p.value, true, nullptr, "param");
  nodes_[v.id].param = &p;
  return v;
}

Var Graph::MatMul(Var a, Var b) {
  Check(a);
  Check(b);
  Tensor2 out = kernels::Matmul(value(a), value(b));
  const bool need_a = Needs(a);
  const bool need_b = Needs(b);
  return Push(std::move(out), need_a || need_b,
              [a, b, need_a, need_b](Graph& g, int self) {
                const Tensor2& gout = g.nodes_[self].grad;
                if (need_a) {
                  g.GradRef(a.id).AddInPlace(
                      kernels::MatmulTransB(gout, g.value(b)));
                }
                if (need_b) {
                  g.GradRef(b.id).AddInPlace(
                      kernels::MatmulTransA(g.value(a), gout));
                }
              },
              "matmul");
}

Var Graph::Add(Var a, Var b) {
  Check(a);
  Check(b);
  if (!value(a).SameShape(value(b))) {
    throw ShapeError("add " + value(a).ShapeString() + " + " +
                     value(b).ShapeString());
  }
  Tensor2 out = value(a);
  out.AddInPlace(value(b));
  return Push(std::move(out), Needs(a) || Needs(b),
              [a, b](Graph& g, int self) {
                const Tensor2& gout = g.nodes_[self].grad;
                if (g.Needs(a)) g.GradRef(a.id).AddInPlace(gout);
                if (g.Needs(b)) g.GradRef(b.id).AddInPlace(gout);
              },
              "add");
}

Var Graph::Sub(Var a, Var b) {
  Check(a);
  Check(b);
  if (!value(a).SameShape(value(b))) {
    throw ShapeError("sub " + value(a).ShapeString() + " - " +
                     value(b).ShapeString());
  }
  Tensor2 out = value(a);
  for (size_t i = 0; i < out.size(); ++i) out[i] -= value(b)[i];
  return Push(std::move(out), Needs(a) || Needs(b),
              [a, b](Graph& g, int self) {
                const Tensor2& gout = g.nodes_[self].grad;
                if (g.Needs(a)) g.GradRef(a.id).AddInPlace(gout);
                if (g.Needs(b)) {
                  Tensor2& gb = g.GradRef(b.id);
                  for (size_t i = 0; i < gb.size(); ++i) gb[i] -= gout[i];
                }
              },
              "sub");
}

Var Graph::Mul(Var a, Var b) {
  Check(a);
  Check(b);
  if (!value(a).SameShape(value(b))) {
    throw ShapeError("mul " + value(a).ShapeString() + " * " +
                     value(b).ShapeString());
  }
  Tensor2 out = value(a);
  for (size_t i = 0; i < out.size(); ++i) out[i] *= value(b)[i];
  return Push(std::move(out), Needs(a) || Needs(b),
              [a, b](Graph& g, int self) {
                const Tensor2& gout = g.nodes_[self].grad;
                if (g.Needs(a)) {
                  Tensor2& ga = g.GradRef(a.id);
                  const Tensor2& vb = g.value(b);
                  for (size_t i = 0; i < ga.size(); ++i) ga[i] += gout[i] * vb[i];
                }
                if (g.Needs(b)) {
                  Tensor2& gb = g.GradRef(b.id);
                  const Tensor2& va = g.value(a);
                  for (size_t i = 0; i < gb.size(); ++i) gb[i] += gout[i] * va[i];
                }
              },
              "mul");
}

Var Graph::AddBias(Var a, Var bias) {
  Check(a);
  Check(bias);
  const Tensor2& va = value(a);
  const Tensor2& vb = value(bias);
  if (vb.rows() != 1 || vb.cols() != va.cols()) {
    throw ShapeError("add_bias " + va.ShapeString() + " + " + vb.ShapeString());
  }
  Tensor2 out = va;
  for (int r = 0; r < out.rows(); ++r) {
    for (int c = 0; c < out.cols(); ++c) out(r, c) += vb(0, c);
  }
  return Push(std::move(out), Needs(a) || Needs(bias),
              [a, bias](Graph& g, int self) {
                const Tensor2& gout = g.nodes_[self].grad;
                if (g.Needs(a)) g.GradRef(a.id).AddInPlace(gout);
                if (g.Needs(bias)) {
                  Tensor2& gb = g.GradRef(bias.id);
                  for (int r = 0; r < gout.rows(); ++r) {
                    for (int c = 0; c < gout.cols(); ++c) gb(0, c) += gout(r, c);
                  }
                }
              },
              "add_bias");
}

Var Graph::Scale(Var a, double s) {
  Check(a);
  Tensor2 out = value(a);
  for (size_t i = 0; i < out.size(); ++i) out[i] *= s;
  return Push(std::move(out), Needs(a),
              [a, s](Graph& g, int self) {
                const Tensor2& gout = g.nodes_[self].grad;
                Tensor2& ga = g.GradRef(a.id);
                for (size_t i = 0; i < ga.size(); ++i) ga[i] += s * gout[i];
              },
              "scale");
}

Var Graph::Relu(Var a) {
  Check(a);
  Tensor2 out = value(a);
  for (size_t i = 0; i < out.size(); ++i) out[i] = std::max(0.0, out[i]);
  return Push(std::move(out), Needs(a),
              [a](Graph& g, int self) {
                const Tensor2& gout = g.nodes_[self].grad;
                const Tensor2& x = g.value(a);
                Tensor2& ga = g.GradRef(a.id);
                for (size_t i = 0; i < ga.size(); ++i) {
                  if (x[i] > 0.0) ga[i] += gout[i];
                }
              },
              "relu");
}

Var Graph::Tanh(Var a) {
  Check(a);
  Tensor2 out = value(a);
  for (size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(out[i]);
  return Push(std::move(out), Needs(a),
              [a](Graph& g, int self) {
                const Tensor2& gout = g.nodes_[self].grad;
                const Tensor2& y = g.nodes_[self].value;
                Tensor2& ga = g.GradRef(a.id);
                for (size_t i = 0; i < ga.size(); ++i) {
                  ga[i] += gout[i] * (1.0 - y[i] * y[i]);
                }
              },
              "tanh");
}

Var Graph::LayerNorm(Var x, Var gamma, Var beta, double eps) {
  Check(x);
  Check(gamma);
  Check(beta);
  const Tensor2& vx = value(x);
  const int rows = vx.rows();
  const int n = vx.cols();
  if (value(gamma).rows() != 1 || value(gamma).cols() != n ||
      !value(gamma).SameShape(value(beta))) {
    throw ShapeError("layer_norm affine shape mismatch");
  }
  Tensor2 xhat(rows, n);
  std::vector<double> inv_std(rows);
  for (int r = 0; r < rows; ++r) {
    double mean = 0.0;
    for (int c = 0; c < n; ++c) mean += vx(r, c);
    mean /= n;
    double var = 0.0;
    for (int c = 0; c < n; ++c) var += (vx(r, c) - mean) * (vx(r, c) - mean);
    var /= n;
    inv_std[r] = 1.0 / std::sqrt(var + eps);
    for (int c = 0; c < n; ++c) xhat(r, c) = (vx(r, c) - mean) * inv_std[r];
  }
  Tensor2 out(rows, n);
  const Tensor2& vg = value(gamma);
  const Tensor2& vb = value(beta);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < n; ++c) out(r, c) = vg(0, c) * xhat(r, c) + vb(0, c);
  }
  return Push(
      std::move(out), Needs(x) || Needs(gamma) || Needs(beta),
      [x, gamma, beta, xhat = std::move(xhat),
       inv_std = std::move(inv_std)](Graph& g, int self) {
        const Tensor2& gout = g.nodes_[self].grad;
        const int rows = gout.rows();
        const int n = gout.cols();
        if (g.Needs(gamma)) {
          Tensor2& gg = g.GradRef(gamma.id);
          for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < n; ++c) gg(0, c) += gout(r, c) * xhat(r, c);
          }
        }
        if (g.Needs(beta)) {
          Tensor2& gb = g.GradRef(beta.id);
          for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < n; ++c) gb(0, c) += gout(r, c);
          }
        }
        if (g.Needs(x)) {
          const Tensor2& vg = g.value(gamma);
          Tensor2& gx = g.GradRef(x.id);
          for (int r = 0; r < rows; ++r) {
            double mean_d = 0.0;
            double mean_dx = 0.0;
            for (int c = 0; c < n; ++c) {
              const double d = gout(r, c) * vg(0, c);
              mean_d += d;
              mean_dx += d * xhat(r, c);
            }
            mean_d /= n;
            mean_dx /= n;
            for (int c = 0; c < n; ++c) {
              const double d = gout(r, c) * vg(0, c);
              gx(r, c) += inv_std[r] * (d - mean_d - xhat(r, c) * mean_dx);
            }
          }
        }
      },
      "layer_norm");
}

Var Graph::SoftmaxRows(Var a) {
  Check(a);
  Tensor2 out = value(a);
  for (int r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    const double mx = *std::max_element(row.begin(), row.end());
    double total = 0.0;
    for (double& v : row) {
      v = std::exp(v - mx);
      total += v;
    }
    for (double& v : row) v /= total;
  }
  return Push(std::move(out), Needs(a),
              [a](Graph& g, int self) {
                const Tensor2& gout = g.nodes_[self].grad;
                const Tensor2& y = g.nodes_[self].value;
                Tensor2& ga = g.GradRef(a.id);
                for (int r = 0; r < y.rows(); ++r) {
                  double dot = 0.0;
                  for (int c = 0; c < y.cols(); ++c) dot += gout(r, c) * y(r, c);
                  for (int c = 0; c < y.cols(); ++c) {
                    ga(r, c) += y(r, c) * (gout(r, c) - dot);
                  }
                }
              },
              "softmax_rows");
}

Var Graph::Transpose(Var a) {
  Check(a);
  const Tensor2& va = value(a);
  Tensor2 out(va.cols(), va.rows());
  for (int r = 0; r < va.rows(); ++r) {
    for (int c = 0; c < va.cols(); ++c) out(c, r) = va(r, c);
  }
  return Push(std::move(out), Needs(a),
              [a](Graph& g, int self) {
                const Tensor2& gout = g.nodes_[self].grad;
                Tensor2& ga = g.GradRef(a.id);
                for (int r = 0; r < ga.rows(); ++r) {
                  for (int c = 0; c < ga.cols(); ++c) ga(r, c) += gout(c, r);
                }
              },
              "transpose");
}

Var Graph::ConcatCols(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("concat_cols of nothing");
  const int rows = value(parts[0]).rows();
  int cols = 0;
  bool need = false;
  for (Var p : parts) {
    Check(p);
    if (value(p).rows() != rows) throw ShapeError("concat_cols row mismatch");
    cols += value(p).cols();
    need = need || Needs(p);
  }
  Tensor2 out(rows, cols);
  int offset = 0;
  for (Var p : parts) {
    const Tensor2& v = value(p);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < v.cols(); ++c) out(r, offset + c) = v(r, c);
    }
    offset += v.cols();
  }
  return Push(std::move(out), need,
              [parts](Graph& g, int self) {
                const Tensor2& gout = g.nodes_[self].grad;
                int offset = 0;
                for (Var p : parts) {
                  const int w = g.value(p).cols();
                  if (g.Needs(p)) {
                    Tensor2& gp = g.GradRef(p.id);
                    for (int r = 0; r < gp.rows(); ++r) {
                      for (int c = 0; c < w; ++c) gp(r, c) += gout(r, offset + c);
                    }
                  }
                  offset += w;
                }
              },
              "concat_cols");
}

Var Graph::ConcatRows(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("concat_rows of nothing");
  const int cols = value(parts[0]).cols();
  int rows = 0;
  bool need = false;
  for (Var p : parts) {
    Check(p);
    if (value(p).cols() != cols) throw ShapeError("concat_rows col mismatch");
    rows += value(p).rows();
    need = need || Needs(p);
  }
  std::vector<double> data;
  data.reserve(size_t(rows) * cols);
  for (Var p : parts) {
    const auto& d = value(p).data();
    data.insert(data.end(), d.begin(), d.end());
  }
  return Push(Tensor2(rows, cols, std::move(data)), need,
              [parts](Graph& g, int self) {
                const Tensor2& gout = g.nodes_[self].grad;
                size_t offset = 0;
                for (Var p : parts) {
                  const size_t n = g.value(p).size();
                  if (g.Needs(p)) {
                    Tensor2& gp = g.GradRef(p.id);
                    for (size_t i = 0; i < n; ++i) gp[i] += gout[offset + i];
                  }
                  offset += n;
                }
              },
              "concat_rows");
}

Var Graph::SliceCols(Var a, int begin, int count) {
  Check(a);
  const Tensor2& va = value(a);
  if (begin < 0 || count < 0 || begin + count > va.cols()) {
    throw ShapeError("slice_cols out of range");
  }
  Tensor2 out(va.rows(), count);
  for (int r = 0; r < va.rows(); ++r) {
    for (int c = 0; c < count; ++c) out(r, c) = va(r, begin + c);
  }
  return Push(std::move(out), Needs(a),
              [a, begin, count](Graph& g, int self) {
                const Tensor2& gout = g.nodes_[self].grad;
                Tensor2& ga = g.GradRef(a.id);
                for (int r = 0; r < ga.rows(); ++r) {
                  for (int c = 0; c < count; ++c) ga(r, begin + c) += gout(r, c);
                }
              },
              "slice_cols");
}

Var Graph::SliceRows(Var a, int begin, int count) {
  Check(a);
  const Tensor2& va = value(a);
  if (begin < 0 || count < 0 || begin + count > va.rows()) {
    throw ShapeError("slice_rows out of range");
  }
  const auto first = va.data().begin() + size_t(begin) * va.cols();
  std::vector<double> data(first, first + size_t(count) * va.cols());
  return Push(Tensor2(count, va.cols(), std::move(data)), Needs(a),
              [a, begin](Graph& g, int self) {
                const Tensor2& gout = g.nodes_[self].grad;
                Tensor2& ga = g.GradRef(a.id);
                const size_t offset = size_t(begin) * ga.cols();
                for (size_t i = 0; i < gout.size(); ++i) ga[offset + i] += gout[i];
              },
              "slice_rows");
}

Var Graph::Reshape(Var a, int rows, int cols) {
  Check(a);
  if (size_t(rows) * size_t(cols) != value(a).size()) {
    throw ShapeError("reshape size mismatch");
  }
  return Push(Tensor2(rows, cols, value(a).data()), Needs(a),
              [a](Graph& g, int self) {
                const Tensor2& gout = g.nodes_[self].grad;
                Tensor2& ga = g.GradRef(a.id);
                for (size_t i = 0; i < ga.size(); ++i) ga[i] += gout[i];
              },
              "reshape");
}

Var Graph::MeanRows(Var a) {
  Check(a);
  const Tensor2& va = value(a);
  if (va.rows() == 0) throw ShapeError("mean_rows of empty tensor");
  Tensor2 out(1, va.cols());
  for (int r = 0; r < va.rows(); ++r) {
    for (int c = 0; c < va.cols(); ++c) out(0, c) += va(r, c);
  }
  for (int c = 0; c < va.cols(); ++c) out(0, c) /= va.rows();
  return Push(std::move(out), Needs(a),
              [a](Graph& g, int self) {
                const Tensor2& gout = g.nodes_[self].grad;
                Tensor2& ga = g.GradRef(a.id);
                const double inv = 1.0 / ga.rows();
                for (int r = 0; r < ga.rows(); ++r) {
                  for (int c = 0; c < ga.cols(); ++c) ga(r, c) += gout(0, c) * inv;
                }
              },
              "mean_rows");
}

Var Graph::Sum(Var a) {
  Check(a);
  double total = 0.0;
  for (double v : value(a).data()) total += v;
  return Push(Tensor2(1, 1, total), Needs(a),
              [a](Graph& g, int self) {
                const double gs = g.nodes_[self].grad[0];
                Tensor2& ga = g.GradRef(a.id);
                for (size_t i = 0; i < ga.size(); ++i) ga[i] += gs;
              },
              "sum");
}

Var Graph::Mean(Var a) {
  Check(a);
  const double n = static_cast<double>(value(a).size());
  if (n == 0) throw ShapeError("mean of empty tensor");
  return Scale(Sum(a), 1.0 / n);
}

Var Graph::RowNorms(Var a, double eps) {
  Check(a);
  const Tensor2& va = value(a);
  Tensor2 out(va.rows(), 1);
  for (int r = 0; r < va.rows(); ++r) {
    double s = eps;
    for (int c = 0; c < va.cols(); ++c) s += va(r, c) * va(r, c);
    out(r, 0) = std::sqrt(s);
  }
  return Push(std::move(out), Needs(a),
              [a](Graph& g, int self) {
                const Tensor2& gout = g.nodes_[self].grad;
                const Tensor2& norms = g.nodes_[self].value;
                const Tensor2& x = g.value(a);
                Tensor2& ga = g.GradRef(a.id);
                for (int r = 0; r < x.rows(); ++r) {
                  const double k = gout(r, 0) / norms(r, 0);
                  for (int c = 0; c < x.cols(); ++c) ga(r, c) += k * x(r, c);
                }
              },
              "row_norms");
}

Var Graph::Min(Var a) {
  Check(a);
  const auto& d = value(a).data();
  if (d.empty()) throw ShapeError("min of empty tensor");
  const size_t arg = std::min_element(d.begin(), d.end()) - d.begin();
  return Push(Tensor2(1, 1, d[arg]), Needs(a),
              [a, arg](Graph& g, int self) {
                g.GradRef(a.id)[arg] += g.nodes_[self].grad[0];
              },
              "min");
}

Var Graph::Mse(Var a, Var b) {
  Var diff = Sub(a, b);
  return Mean(Mul(diff, diff));
}

Var Graph::BceWithLogits(Var logits, const Tensor2& targets) {
  Check(logits);
  const Tensor2& z = value(logits);
  if (!z.SameShape(targets)) throw ShapeError("bce target shape mismatch");
  double total = 0.0;
  for (size_t i = 0; i < z.size(); ++i) {
    total += std::max(z[i], 0.0) - z[i] * targets[i] +
             std::log1p(std::exp(-std::abs(z[i])));
  }
  const double n = static_cast<double>(z.size());
  return Push(Tensor2(1, 1, total / n), Needs(logits),
              [logits, targets, n](Graph& g, int self) {
                const double gs = g.nodes_[self].grad[0];
                const Tensor2& z = g.value(logits);
                Tensor2& gz = g.GradRef(logits.id);
                for (size_t i = 0; i < z.size(); ++i) {
                  const double p = 1.0 / (1.0 + std::exp(-z[i]));
                  gz[i] += gs * (p - targets[i]) / n;
                }
              },
              "bce_with_logits");
}

void Graph::Backward(Var loss) {
  if (nodes_.empty()) throw ShapeError("backward before forward");
  Check(loss);
  if (value(loss).rows() != 1 || value(loss).cols() != 1) {
    throw ShapeError("backward needs a scalar loss, got " +
                     value(loss).ShapeString());
  }
  for (Node& n : nodes_) n.grad = Tensor2();
  GradRef(loss.id)[0] = 1.0;
  for (int i = loss.id; i >= 0; --i) {
    Node& n = nodes_[i];
    if (n.grad.empty() || !n.backward) continue;
    n.backward(*this, i);
  }
  for (const Node& n : nodes_) {
    if (n.param != nullptr && !n.grad.empty() && !n.grad.AllFinite()) {
      throw NumericError("non-finite gradient for " + n.param->name);
    }
  }
  backward_done_ = true;
}

std::vector<std::pair<Parameter*, const Tensor2*>> Graph::ParameterGradients()
    const {
  std::vector<std::pair<Parameter*, const Tensor2*>> out;
  if (!backward_done_) return out;
  for (const Node& n : nodes_) {
    if (n.param != nullptr && !n.grad.empty()) out.emplace_back(n.param, &n.grad);
  }
  return out;
}

void Backward(Graph& g, Var loss) {
  g.Backward(loss);
  for (auto [param, grad] : g.ParameterGradients()) {
    param->grad.AddInPlace(*grad);
  }
}

}  // namespace anchorplan
