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


#ifndef ANCHORPLAN_DECODER_H_
#define ANCHORPLAN_DECODER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "anchorplan/graph.h"
#include "anchorplan/layers.h"
#include "anchorplan/perception.h"
#include "anchorplan/trajectory.h"

namespace anchorplan {

// Which perception streams reach the encoder. The status token (ego speed)
// is always present; masking the command stream zeroes its one-hot part.
inline constexpr int kNumMaskLevels = 5;

struct StreamMask {
  bool bev = true;
  bool objects = true;
  bool map = true;
  bool command = true;

  // Comma list of "bev", "obj", "map", "cmd"; "none" or "" for all off.
  static StreamMask Parse(const std::string& spec);
  // Cumulative ablation level: 0 none, 1 bev, 2 +obj, 3 +map, 4 +cmd.
  static StreamMask Cumulative(int level);
  std::string ToString() const;
  StreamMask Intersect(const StreamMask& o) const {
    return {bev && o.bev, objects && o.objects, map && o.map,
            command && o.command};
  }
  friend bool operator==(const StreamMask&, const StreamMask&) = default;
};

enum class StreamType : int {
  kBev = 0,
  kObject = 1,
  kMap = 2,
  kStatus = 3,
  kNumStreamTypes = 4,
};

struct DecoderConfig {
  int embed = 32;
  int heads = 4;
  int queries = 4;  // dynamic anchors emitted; 0 disables the heads
  int head_hidden = 64;
  int ff_hidden = 64;
  int horizon = kDefaultHorizon;
  int grid = 32;
  int patch = 8;
  int channels = kNumBevChannels;
  int object_width = PerceptionConfig::object_width();
  int map_width = 14;
  int status_width = kNumCommands + 1;
  double dt = kDefaultDt;
  // Units of the kinematic head outputs (see KinematicBasis).
  double velocity_scale = 10.0;  // m/s
  double accel_scale = 4.0;      // m/s^2
  double jerk_scale = 4.0;       // m/s^3
  StreamMask mask;

  int patches() const { return (grid / patch) * (grid / patch); }
  int patch_dim() const { return channels * patch * patch; }
  // Throws ShapeError on inconsistent widths.
  void Validate() const;
};

// Linear map (2H x 2H) from a head output row to a flattened trajectory
// row. The head emits the first-step velocity, the first acceleration and
// H - 2 jerks, each an (x, y) pair in the config's units; positions are
// their finite-difference integral from the origin at spacing dt. The map
// is invertible, and the jerk of the result is exactly the jerk entries.
Tensor2 KinematicBasis(const DecoderConfig& cfg);

// Encoder over the perception streams plus the dynamic anchor heads.
class DecoderModel {
 public:
  DecoderModel(const DecoderConfig& cfg, uint64_t seed);
  DecoderModel(DecoderModel&&) = default;

  const DecoderConfig& config() const { return cfg_; }
  ParameterStore& params() { return store_; }
  const ParameterStore& params() const { return store_; }

  // Tokens (n x embed) in stream order: BEV patches, objects, map elements,
  // status; each is a projection plus its stream-type embedding. Throws
  // ShapeError when the bundle widths disagree with the config.
  Var EncodeStreams(Graph& g, const PerceptionBundle& p,
                    std::vector<StreamType>* types = nullptr) const;
  // As above with `mask` further restricting the config mask.
  Var EncodeStreams(Graph& g, const PerceptionBundle& p,
                    const StreamMask& mask,
                    std::vector<StreamType>* types = nullptr) const;

  // One self-attention + feed-forward block over the tokens.
  Var Contextualize(Graph& g, Var tokens) const;

  // Contextualize(EncodeStreams(p)).
  Var Encode(Graph& g, const PerceptionBundle& p) const;
  Var Encode(Graph& g, const PerceptionBundle& p,
             const StreamMask& mask) const;

  // One 1 x 2H row per query. Optionally returns attention weights.
  std::vector<Var> DecodeAnchors(Graph& g, Var tokens,
                                 std::vector<Var>* attention = nullptr) const;

  // Graph-free convenience for inference.
  std::vector<FlatTrajectory> Anchors(const PerceptionBundle& p) const;
  std::vector<FlatTrajectory> Anchors(const PerceptionBundle& p,
                                      const StreamMask& mask) const;

 private:
  Var Embed(Graph& g, const Tensor2& x, const Linear& proj,
            StreamType type) const;

  DecoderConfig cfg_;
  ParameterStore store_;
  Linear bev_proj_;
  Linear object_proj_;
  Linear map_proj_;
  Linear status_proj_;
  Parameter* type_embedding_ = nullptr;  // kNumStreamTypes x embed
  MultiHeadAttention self_attn_;
  LayerNormParams norm1_;
  Mlp feed_forward_;
  LayerNormParams norm2_;
  Parameter* queries_ = nullptr;  // queries x embed
  MultiHeadAttention cross_attn_;
  std::vector<Mlp> head_mlps_;
  Tensor2 basis_;
};

// BEV raster cut into non-overlapping patch x patch tiles, row-major over
// tiles, each tile flattened channel-major -> patches x patch_dim.
Tensor2 BevPatches(const PerceptionBundle& p, int patch);

// Status token: command one-hot (zeroed when masked) followed by ego speed.
std::vector<double> StatusToken(const PerceptionBundle& p, bool command_on);

// ade(anchor, expert) as a 1 x 1 node.
Var AdeNode(Graph& g, Var anchor, const FlatTrajectory& expert);

// min_j ade_j + gamma * mean_j ade_j.
Var DecoderLoss(Graph& g, const std::vector<Var>& anchors,
                const FlatTrajectory& expert, double gamma = 0.01);
double DecoderLossValue(const std::vector<FlatTrajectory>& anchors,
                        const FlatTrajectory& expert, double gamma = 0.01);

FlatTrajectory RowToTrajectory(const Tensor2& row);

}  // namespace anchorplan

#endif  // ANCHORPLAN_DECODER_H_
