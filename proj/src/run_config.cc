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


#include "anchorplan/run_config.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "anchorplan/hash.h"

namespace anchorplan {

namespace {

constexpr uint64_t kSamplingSeedOffset = 11;

// Rejects keys of `given` absent from `reference`, recursing into objects.
void CheckKeys(const nlohmann::json& given, const nlohmann::json& reference,
               const std::string& where) {
  if (!given.is_object()) {
    throw ConfigError("config: " + where + " must be an object");
  }
  for (const auto& [key, value] : given.items()) {
    const std::string path = where.empty() ? key : where + "." + key;
    if (!reference.contains(key)) {
      throw ConfigError("config: unknown key '" + path + "'");
    }
    if (reference.at(key).is_object()) CheckKeys(value, reference.at(key), path);
  }
}

template <typename T>
void Read(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

RunConfig::RunConfig() { planner.seed = kSamplingSeedOffset; }

void RunConfig::SetSeed(uint64_t base) {
  seed = base;
  planner.seed = base + kSamplingSeedOffset;
}

DecoderConfig RunConfig::Decoder() const {
  DecoderConfig d;
  d.queries = planner.k_dynamic;
  d.mask = StreamMask::Parse(stream_mask);
  return d;
}

DenoiserConfig RunConfig::Denoiser() const {
  DenoiserConfig d;
  d.T = planner.T;
  d.schedule = planner.schedule;
  return d;
}

TrainConfig RunConfig::Training() const {
  TrainConfig t = train;
  t.seed = TrainSeed();
  return t;
}

KMeansOptions RunConfig::Clustering() const {
  KMeansOptions k = kmeans;
  k.k = planner.k_static;
  k.seed = VocabSeed();
  return k;
}

void RunConfig::Validate() const {
  try {
    planner.Validate();
    epdms.Validate();
    Decoder().Validate();
    StreamMask::Parse(stream_mask);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (data.train_per_template < 1 || data.heldout_per_template < 1 ||
      data.eval_per_template < 1 ||
      data.eval_per_template > data.heldout_per_template) {
    throw ConfigError(
        "config: data counts must be positive with eval_per_template <= "
        "heldout_per_template");
  }
  if (train.epochs < 1 || train.batch_size < 1 || !(train.lr > 0.0) ||
      !(train.lr_final > 0.0) || train.warmup_epochs < 0) {
    throw ConfigError("config: training options out of range");
  }
  if (kmeans.max_iters < 1 || kmeans.restarts < 1 || !(kmeans.tol >= 0.0)) {
    throw ConfigError("config: kmeans options out of range");
  }
  if (static_cast<int>(kAllTemplates.size()) * data.train_per_template <
      planner.k_static) {
    throw ConfigError("config: training corpus smaller than K_s");
  }
  const RunPaths& p = paths;
  for (const std::string* s : {&p.dataset, &p.heldout, &p.vocabulary,
                                &p.checkpoint, &p.reports, &p.renders,
                                &p.ablation}) {
    if (s->empty()) throw ConfigError("config: empty artifact path");
    const std::filesystem::path path(*s);
    if (path.is_absolute() || *s == ".") {
      throw ConfigError("config: artifact path '" + *s +
                        "' must name an entry inside the output directory");
    }
    for (const auto& part : path) {
      if (part == "..") {
        throw ConfigError("config: artifact path '" + *s +
                          "' leaves the output directory");
      }
    }
  }
}

nlohmann::json ToJson(const RunConfig& c) {
  nlohmann::json j;
  j["seed"] = c.seed;
  j["paths"] = {{"dataset", c.paths.dataset},
                {"heldout", c.paths.heldout},
                {"vocabulary", c.paths.vocabulary},
                {"checkpoint", c.paths.checkpoint},
                {"reports", c.paths.reports},
                {"renders", c.paths.renders},
                {"ablation", c.paths.ablation}};
  j["data"] = {{"train_per_template", c.data.train_per_template},
               {"heldout_per_template", c.data.heldout_per_template},
               {"eval_per_template", c.data.eval_per_template}};
  j["planner"] = ToJson(c.planner);
  j["epdms"] = ToJson(c.epdms);
  j["train"] = {{"epochs", c.train.epochs},
                {"batch_size", c.train.batch_size},
                {"lr", c.train.lr},
                {"lr_final", c.train.lr_final},
                {"warmup_epochs", c.train.warmup_epochs},
                {"gamma", c.train.gamma},
                {"grad_clip", c.train.grad_clip}};
  j["kmeans"] = {{"max_iters", c.kmeans.max_iters},
                 {"tol", c.kmeans.tol},
                 {"restarts", c.kmeans.restarts}};
  j["stream_mask"] = c.stream_mask;
  return j;
}

RunConfig RunConfigFromJson(const nlohmann::json& j) {
  RunConfig c;
  try {
    CheckKeys(j, ToJson(c), "");
    if (j.contains("seed")) c.SetSeed(j.at("seed").get<uint64_t>());
    if (j.contains("paths")) {
      const auto& p = j.at("paths");
      Read(p, "dataset", c.paths.dataset);
      Read(p, "heldout", c.paths.heldout);
      Read(p, "vocabulary", c.paths.vocabulary);
      Read(p, "checkpoint", c.paths.checkpoint);
      Read(p, "reports", c.paths.reports);
      Read(p, "renders", c.paths.renders);
      Read(p, "ablation", c.paths.ablation);
    }
    if (j.contains("data")) {
      const auto& d = j.at("data");
      Read(d, "train_per_template", c.data.train_per_template);
      Read(d, "heldout_per_template", c.data.heldout_per_template);
      Read(d, "eval_per_template", c.data.eval_per_template);
    }
    if (j.contains("planner")) {
      nlohmann::json merged = ToJson(c.planner);
      merged.update(j.at("planner"));
      c.planner = PlannerConfigFromJson(merged);
    }
    if (j.contains("epdms")) {
      nlohmann::json merged = ToJson(c.epdms);
      if (j.at("epdms").contains("weights")) {
        merged["weights"].update(j.at("epdms").at("weights"));
      }
      for (const auto& [key, value] : j.at("epdms").items()) {
        if (key != "weights") merged[key] = value;
      }
      c.epdms = EpdmsConfigFromJson(merged);
    }
    if (j.contains("train")) {
      const auto& t = j.at("train");
      Read(t, "epochs", c.train.epochs);
      Read(t, "batch_size", c.train.batch_size);
      Read(t, "lr", c.train.lr);
      Read(t, "lr_final", c.train.lr_final);
      Read(t, "warmup_epochs", c.train.warmup_epochs);
      Read(t, "gamma", c.train.gamma);
      Read(t, "grad_clip", c.train.grad_clip);
    }
    if (j.contains("kmeans")) {
      const auto& k = j.at("kmeans");
      Read(k, "max_iters", c.kmeans.max_iters);
      Read(k, "tol", c.kmeans.tol);
      Read(k, "restarts", c.kmeans.restarts);
    }
    Read(j, "stream_mask", c.stream_mask);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.Validate();
  return c;
}

RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  return RunConfigFromJson(j);
}

std::string CanonicalJson(const RunConfig& c) { return ToJson(c).dump(2); }

std::string ModelConfigHash(const RunConfig& c) {
  nlohmann::json j = ToJson(c);
  j.erase("paths");
  j.erase("epdms");
  j["data"].erase("heldout_per_template");
  j["data"].erase("eval_per_template");
  j["planner"].erase("seed");
  return HexDigest(Fnv1a64(j.dump()));
}

}  // namespace anchorplan
