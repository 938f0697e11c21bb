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


#ifndef ANCHORPLAN_COMMANDS_H_
#define ANCHORPLAN_COMMANDS_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "anchorplan/checkpoint.h"
#include "anchorplan/evaluation.h"
#include "anchorplan/kmeans.h"
#include "anchorplan/planner.h"
#include "anchorplan/run_config.h"
#include "anchorplan/scenario.h"
#include "anchorplan/trainer.h"
#include "json.hpp"

namespace anchorplan {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitMissingPrerequisite = 3,
  kExitNumeric = 4,
};

// A failed precondition with its exit code and a stable kind tag.
class CommandError : public std::runtime_error {
 public:
  CommandError(int code, std::string kind, const std::string& message)
      : std::runtime_error(message), code_(code), kind_(std::move(kind)) {}
  int code() const { return code_; }
  const std::string& kind() const { return kind_; }

 private:
  int code_;
  std::string kind_;
};

// Single-line JSON: {"code":N,"error":"kind","message":"...","status":"error"}
std::string ErrorLine(int code, const std::string& kind,
                      const std::string& message);

// Exclusive advisory lock on <dir>/.anchorplan.lock for the object's
// lifetime. Throws CommandError when another process holds it.
class ArtifactLock {
 public:
  explicit ArtifactLock(const std::filesystem::path& dir);
  ~ArtifactLock();
  ArtifactLock(const ArtifactLock&) = delete;
  ArtifactLock& operator=(const ArtifactLock&) = delete;

 private:
  int fd_ = -1;
};

struct CommandContext {
  RunConfig config;
  std::filesystem::path out = ".";
  std::ostream* log = nullptr;  // progress lines; may be null
};

std::string ReadFileBytes(const std::filesystem::path& path);
// Writes through a temporary file and a rename.
void WriteFileBytes(const std::filesystem::path& path,
                    const std::string& bytes);
std::string FileDigest(const std::filesystem::path& path);

// Scenarios listed in <dir>/manifest.json, in manifest order. When
// per_template >= 0 only the first per_template of each template are kept.
std::vector<Scenario> LoadCorpus(const std::filesystem::path& dir,
                                 int per_template = -1);

// Vocabulary, models and checkpoint metadata for one trained planner.
struct TrainedPlanner {
  StaticVocabulary vocab;
  std::unique_ptr<PlannerModels> models;
  PlannerConfig planner;
  std::map<std::string, std::string> metadata;

  Planner MakePlanner() const;
};

// Loads the vocabulary and the checkpoint at `checkpoint`, verifying that
// the checkpoint was trained with this vocabulary and `expected` config.
TrainedPlanner LoadTrained(const CommandContext& ctx,
                           const std::filesystem::path& checkpoint,
                           const RunConfig& expected);

nlohmann::json CmdGenData(const CommandContext& ctx);
nlohmann::json CmdBuildVocab(const CommandContext& ctx);
nlohmann::json CmdTrain(const CommandContext& ctx);

struct EvalRequest {
  InitMode mode = InitMode::kHybrid;
  std::optional<int> steps;  // defaults to the planner config
  bool expert = false;       // score the expert, bypassing the planner
};
nlohmann::json CmdEval(const CommandContext& ctx, const EvalRequest& req);

enum class AblationAxis { kSteps, kHeads };
// kSteps: steps 1..5 on the trained planner. kHeads: cumulative stream
// rows none, +bev, +obj, +map, +cmd, each a model trained with that mask
// (row none has no dynamic heads), evaluated on the whole held-out set.
nlohmann::json CmdAblate(const CommandContext& ctx, AblationAxis axis);

struct RenderRequest {
  std::string id;
  InitMode mode = InitMode::kHybrid;
  std::optional<int> steps;
};
nlohmann::json CmdRender(const CommandContext& ctx, const RenderRequest& req);

// Collects evaluation and ablation outputs into <reports>/report.md.
nlohmann::json CmdReport(const CommandContext& ctx);

// Parses global flags and a verb, runs it under the artifact lock and
// returns an ExitCode. Status goes to `out`, error lines to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace anchorplan

#endif  // ANCHORPLAN_COMMANDS_H_
