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


#ifndef ANCHORPLAN_RUN_CONFIG_H_
#define ANCHORPLAN_RUN_CONFIG_H_

#include <cstdint>
#include <stdexcept>
#include <string>

#include "anchorplan/decoder.h"
#include "anchorplan/denoiser.h"
#include "anchorplan/epdms.h"
#include "anchorplan/kmeans.h"
#include "anchorplan/planner.h"
#include "anchorplan/trainer.h"
#include "json.hpp"

namespace anchorplan {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Artifact names, relative to the output directory.
struct RunPaths {
  std::string dataset = "dataset";
  std::string heldout = "heldout";
  std::string vocabulary = "vocab.json";
  std::string checkpoint = "model.ckpt";
  std::string reports = "reports";
  std::string renders = "renders";
  std::string ablation = "ablation";
};

struct DataCounts {
  int train_per_template = 334;
  int heldout_per_template = 100;
  // Leading held-out scenarios per template used by `eval` and the steps
  // ablation; the stream ablation uses the whole held-out set.
  int eval_per_template = 50;
};

struct RunConfig {
  // Base seed; every stream seed below is derived from it.
  uint64_t seed = 0;
  RunPaths paths;
  DataCounts data;
  PlannerConfig planner;  // planner.seed is the sampling seed
  EpdmsConfig epdms;
  TrainConfig train;
  KMeansOptions kmeans;
  std::string stream_mask = "bev,obj,map,cmd";

  RunConfig();

  uint64_t DataSeed() const { return seed + 1; }
  uint64_t HeldoutSeed() const { return seed + 2; }
  uint64_t ModelSeed() const { return seed + 3; }
  uint64_t TrainSeed() const { return seed + 5; }
  uint64_t VocabSeed() const { return seed + 7; }
  // Resets the base seed and the sampling seed together.
  void SetSeed(uint64_t base);

  DecoderConfig Decoder() const;
  DenoiserConfig Denoiser() const;
  // Training options with the derived seed applied.
  TrainConfig Training() const;
  KMeansOptions Clustering() const;

  // Throws ConfigError naming the first invalid field.
  void Validate() const;
};

// Sorted keys, so dumps are canonical and diffable.
nlohmann::json ToJson(const RunConfig& c);
// Missing keys keep defaults; unknown keys and bad values throw ConfigError.
RunConfig RunConfigFromJson(const nlohmann::json& j);
RunConfig LoadRunConfig(const std::string& path);
std::string CanonicalJson(const RunConfig& c);

// Hash of every setting that shapes a trained checkpoint (data, seeds,
// model, training, planner). Paths, held-out counts, the sampling seed and
// metric settings are excluded.
std::string ModelConfigHash(const RunConfig& c);

}  // namespace anchorplan

#endif  // ANCHORPLAN_RUN_CONFIG_H_
