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


#include "anchorplan/decoder.h"

#include <algorithm>
#include <sstream>

namespace anchorplan {

namespace {

constexpr char kPrefix[] = "dyn_decoder/";

std::string Name(const std::string& s) { return kPrefix + s; }

Tensor2 Stack(const std::vector<std::vector<double>>& rows, int width,
              const char* what) {
  Tensor2 out(static_cast<int>(rows.size()), width);
  for (size_t r = 0; r < rows.size(); ++r) {
    if (static_cast<int>(rows[r].size()) != width) {
      throw ShapeError(std::string("decoder: ") + what + " token width " +
                       std::to_string(rows[r].size()) + ", expected " +
                       std::to_string(width));
    }
    std::copy(rows[r].begin(), rows[r].end(), out.row(int(r)).begin());
  }
  return out;
}

}  // namespace

StreamMask StreamMask::Parse(const std::string& spec) {
  StreamMask m{false, false, false, false};
  if (spec.empty() || spec == "none") return m;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "bev") {
      m.bev = true;
    } else if (item == "obj") {
      m.objects = true;
    } else if (item == "map") {
      m.map = true;
    } else if (item == "cmd") {
      m.command = true;
    } else {
      throw std::invalid_argument("stream mask: unknown stream '" + item + "'");
    }
  }
  return m;
}

StreamMask StreamMask::Cumulative(int level) {
  if (level < 0 || level >= kNumMaskLevels) {
    throw std::invalid_argument("stream mask: level out of range");
  }
  return {level >= 1, level >= 2, level >= 3, level >= 4};
}

std::string StreamMask::ToString() const {
  std::vector<std::string> on;
  if (bev) on.push_back("bev");
  if (objects) on.push_back("obj");
  if (map) on.push_back("map");
  if (command) on.push_back("cmd");
  if (on.empty()) return "none";
  std::string out = on[0];
  for (size_t i = 1; i < on.size(); ++i) out += "," + on[i];
  return out;
}

void DecoderConfig::Validate() const {
  if (embed <= 0 || heads <= 0 || embed % heads != 0) {
    throw ShapeError("decoder: embed width must divide by heads");
  }
  if (queries < 0) throw ShapeError("decoder: negative query count");
  if (patch <= 0 || grid % patch != 0) {
    throw ShapeError("decoder: patch size must divide the grid");
  }
  if (horizon < 2) throw ShapeError("decoder: horizon must be at least 2");
  if (!(dt > 0.0)) throw ShapeError("decoder: dt must be positive");
}

Tensor2 KinematicBasis(const DecoderConfig& cfg) {
  const int h = cfg.horizon;
  Tensor2 basis(2 * h, 2 * h);
  for (int in = 0; in < 2 * h; ++in) {
    const int axis = in % 2;
    const int slot = in / 2;
    double v = slot == 0 ? cfg.velocity_scale : 0.0;
    double a = slot == 1 ? cfg.accel_scale : 0.0;
    double pos = 0.0;
    for (int k = 0; k < h; ++k) {
      pos += v * cfg.dt;
      basis(in, 2 * k + axis) = pos;
      v += a * cfg.dt;
      if (slot == k + 2) a += cfg.jerk_scale * cfg.dt;
    }
  }
  return basis;
}

Tensor2 BevPatches(const PerceptionBundle& p, int patch) {
  const int per_side = p.grid / patch;
  const int channels = static_cast<int>(p.bev.size()) / (p.grid * p.grid);
  Tensor2 out(per_side * per_side, channels * patch * patch);
  for (int pr = 0; pr < per_side; ++pr) {
    for (int pc = 0; pc < per_side; ++pc) {
      auto row = out.row(pr * per_side + pc);
      int k = 0;
      for (int c = 0; c < channels; ++c) {
        for (int dr = 0; dr < patch; ++dr) {
          for (int dc = 0; dc < patch; ++dc) {
            row[k++] = p.Bev(c, pr * patch + dr, pc * patch + dc);
          }
        }
      }
    }
  }
  return out;
}

std::vector<double> StatusToken(const PerceptionBundle& p, bool command_on) {
  std::vector<double> token(p.command_token.size(), 0.0);
  if (command_on) token = p.command_token;
  token.insert(token.end(), p.ego_token.begin(), p.ego_token.end());
  return token;
}

DecoderModel::DecoderModel(const DecoderConfig& cfg, uint64_t seed)
    : cfg_(cfg) {
  cfg_.Validate();
  Rng rng(seed);
  const int d = cfg_.embed;
  bev_proj_ = Linear(store_, Name("bev_proj"), cfg_.patch_dim(), d, rng);
  object_proj_ = Linear(store_, Name("object_proj"), cfg_.object_width, d, rng);
  map_proj_ = Linear(store_, Name("map_proj"), cfg_.map_width, d, rng);
  status_proj_ = Linear(store_, Name("status_proj"), cfg_.status_width, d, rng);
  type_embedding_ = store_.CreateNormal(
      Name("type_embedding"), int(StreamType::kNumStreamTypes), d, 0.1, rng);
  self_attn_ = MultiHeadAttention(store_, Name("self_attn"), d, cfg_.heads, rng);
  norm1_ = LayerNormParams(store_, Name("norm1"), d);
  feed_forward_ = Mlp(store_, Name("ff"), {d, cfg_.ff_hidden, d}, rng);
  norm2_ = LayerNormParams(store_, Name("norm2"), d);
  if (cfg_.queries > 0) {
    queries_ = store_.CreateNormal(Name("queries"), cfg_.queries, d, 1.0, rng);
    cross_attn_ =
        MultiHeadAttention(store_, Name("cross_attn"), d, cfg_.heads, rng);
    for (int h = 0; h < cfg_.queries; ++h) {
      head_mlps_.emplace_back(
          store_, Name("head" + std::to_string(h)),
          std::vector<int>{d, cfg_.head_hidden, 2 * cfg_.horizon}, rng);
    }
    basis_ = KinematicBasis(cfg_);
  }
}

Var DecoderModel::Embed(Graph& g, const Tensor2& x, const Linear& proj,
                        StreamType type) const {
  const Var projected = proj.Forward(g, g.Input(x));
  const Var type_row =
      g.SliceRows(g.Param(*type_embedding_), static_cast<int>(type), 1);
  return g.AddBias(projected, type_row);
}

Var DecoderModel::EncodeStreams(Graph& g, const PerceptionBundle& p,
                                std::vector<StreamType>* types) const {
  return EncodeStreams(g, p, StreamMask{}, types);
}

Var DecoderModel::EncodeStreams(Graph& g, const PerceptionBundle& p,
                                const StreamMask& extra,
                                std::vector<StreamType>* types) const {
  const StreamMask mask = cfg_.mask.Intersect(extra);
  std::vector<Var> parts;
  auto note = [&](StreamType t, int n) {
    if (types != nullptr) types->insert(types->end(), n, t);
  };
  if (mask.bev) {
    if (p.grid != cfg_.grid ||
        p.bev.size() != size_t(cfg_.channels) * cfg_.grid * cfg_.grid) {
      throw ShapeError("decoder: BEV raster does not match the config grid");
    }
    const Tensor2 patches = BevPatches(p, cfg_.patch);
    parts.push_back(Embed(g, patches, bev_proj_, StreamType::kBev));
    note(StreamType::kBev, patches.rows());
  }
  if (mask.objects && !p.object_tokens.empty()) {
    const Tensor2 x = Stack(p.object_tokens, cfg_.object_width, "object");
    parts.push_back(Embed(g, x, object_proj_, StreamType::kObject));
    note(StreamType::kObject, x.rows());
  }
  if (mask.map && !p.map_tokens.empty()) {
    const Tensor2 x = Stack(p.map_tokens, cfg_.map_width, "map");
    parts.push_back(Embed(g, x, map_proj_, StreamType::kMap));
    note(StreamType::kMap, x.rows());
  }
  const Tensor2 status =
      Stack({StatusToken(p, mask.command)}, cfg_.status_width, "status");
  parts.push_back(Embed(g, status, status_proj_, StreamType::kStatus));
  note(StreamType::kStatus, 1);

  return parts.size() == 1 ? parts[0] : g.ConcatRows(parts);
}

Var DecoderModel::Contextualize(Graph& g, Var x) const {
  const Var h = norm1_.Forward(g, g.Add(x, self_attn_.Forward(g, x, x)));
  return norm2_.Forward(g, g.Add(h, feed_forward_.Forward(g, h)));
}

Var DecoderModel::Encode(Graph& g, const PerceptionBundle& p) const {
  return Contextualize(g, EncodeStreams(g, p));
}

Var DecoderModel::Encode(Graph& g, const PerceptionBundle& p,
                         const StreamMask& mask) const {
  return Contextualize(g, EncodeStreams(g, p, mask));
}

std::vector<Var> DecoderModel::DecodeAnchors(
    Graph& g, Var tokens, std::vector<Var>* attention) const {
  std::vector<Var> out;
  if (cfg_.queries == 0) return out;
  if (g.value(tokens).rows() == 0) {
    throw ShapeError("decoder: empty token sequence");
  }
  const Var attended =
      cross_attn_.Forward(g, g.Param(*queries_), tokens, attention);
  for (int h = 0; h < cfg_.queries; ++h) {
    const Var row = g.SliceRows(attended, h, 1);
    out.push_back(g.MatMul(head_mlps_[h].Forward(g, row), g.Input(basis_)));
  }
  return out;
}

std::vector<FlatTrajectory> DecoderModel::Anchors(
    const PerceptionBundle& p) const {
  return Anchors(p, StreamMask{});
}

std::vector<FlatTrajectory> DecoderModel::Anchors(
    const PerceptionBundle& p, const StreamMask& mask) const {
  Graph g;
  const std::vector<Var> rows = DecodeAnchors(g, Encode(g, p, mask));
  std::vector<FlatTrajectory> out;
  for (Var v : rows) out.push_back(RowToTrajectory(g.value(v)));
  return out;
}

FlatTrajectory RowToTrajectory(const Tensor2& row) {
  return FlatTrajectory(row.data());
}

Var AdeNode(Graph& g, Var anchor, const FlatTrajectory& expert) {
  const int h = expert.horizon();
  if (g.value(anchor).size() != expert.values.size()) {
    throw HorizonMismatch("decoder loss: anchor and expert horizons differ");
  }
  const Var diff = g.Sub(anchor, g.Input(Tensor2(1, 2 * h, expert.values)));
  return g.Mean(g.RowNorms(g.Reshape(diff, h, 2)));
}

Var DecoderLoss(Graph& g, const std::vector<Var>& anchors,
                const FlatTrajectory& expert, double gamma) {
  if (anchors.empty()) throw ShapeError("decoder loss: no anchors");
  std::vector<Var> ades;
  for (Var a : anchors) ades.push_back(AdeNode(g, a, expert));
  const Var all = ades.size() == 1 ? ades[0] : g.ConcatRows(ades);
  return g.Add(g.Min(all), g.Scale(g.Mean(all), gamma));
}

double DecoderLossValue(const std::vector<FlatTrajectory>& anchors,
                        const FlatTrajectory& expert, double gamma) {
  double best = 0.0;
  double sum = 0.0;
  for (size_t j = 0; j < anchors.size(); ++j) {
    const double a = Ade(anchors[j], expert);
    best = j == 0 ? a : std::min(best, a);
    sum += a;
  }
  return best + gamma * sum / double(anchors.size());
}

}  // namespace anchorplan
