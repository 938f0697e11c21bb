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

#include "anchorplan/commands.h"

#include <fcntl.h>
#include <omp.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "anchorplan/hash.h"
#include "anchorplan/perception.h"
#include "anchorplan/render.h"
#include "anchorplan/scenario_gen.h"
#include "anchorplan/tensor.h"

namespace anchorplan {

namespace fs = std::filesystem;

namespace {

constexpr const char* kManifest = "manifest.json";
constexpr const char* kLockName = ".anchorplan.lock";
constexpr const char* kRunConfigName = "run_config.json";
constexpr int kMaxAblationSteps = 5;

CommandError Missing(const std::string& message) {
  return CommandError(kExitMissingPrerequisite, "missing_prerequisite",
                      message);
}

CommandError Mismatch(const std::string& message) {
  return CommandError(kExitConfig, "artifact_mismatch", message);
}

void Log(const CommandContext& ctx, const nlohmann::json& line) {
  if (ctx.log != nullptr) *ctx.log << line.dump() << "\n" << std::flush;
}

fs::path At(const CommandContext& ctx, const std::string& rel) {
  return ctx.out / rel;
}

void Require(const fs::path& path, const std::string& producer) {
  if (!fs::exists(path)) {
    throw Missing(path.string() + " not found; run `" + producer + "` first");
  }
}

std::string StepsLabel(InitMode mode, int steps) {
  return std::string("eval_") + std::string(InitModeName(mode)) + "_steps" +
         std::to_string(steps);
}

nlohmann::json ScoresJson(const CorpusSummary& s) {
  nlohmann::json j;
  for (SubScoreId id : kColumnOrder) {
    j[std::string(SubScoreName(id))] = s.mean_filtered[static_cast<int>(id)];
  }
  return j;
}

nlohmann::json SummaryJson(const std::string& label,
                           const std::vector<Scenario>& scenarios,
                           const EvalResult& r) {
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [t, cs] : PerTemplate(scenarios, r)) {
    per[std::string(TemplateName(t))] = {{"EPDMS", cs.epdms},
                                         {"count", cs.count}};
  }
  return {{"label", label},
          {"count", r.summary.count},
          {"EPDMS", r.summary.epdms},
          {"subscores", ScoresJson(r.summary)},
          {"mean_ade", r.mean_ade},
          {"per_template", per}};
}

std::string CsvNumber(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string SubScoreColumns() {
  std::string s;
  for (SubScoreId id : kColumnOrder) {
    s += ",";
    s += SubScoreName(id);
  }
  return s + ",EPDMS,ADE";
}

std::string SubScoreValues(const EvalResult& r) {
  std::string s;
  for (SubScoreId id : kColumnOrder) {
    s += "," + CsvNumber(r.summary.mean_filtered[static_cast<int>(id)]);
  }
  return s + "," + CsvNumber(r.summary.epdms) + "," + CsvNumber(r.mean_ade);
}

void CheckFinite(const EvalResult& r) {
  if (!std::isfinite(r.summary.epdms) || !std::isfinite(r.mean_ade)) {
    throw NumericError("evaluation produced a non-finite score");
  }
}

std::vector<TrainExample> MakeExamples(const std::vector<Scenario>& corpus) {
  std::vector<TrainExample> data(corpus.size());
  const long n = static_cast<long>(corpus.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    data[i] = {ExtractPerception(corpus[i]), Flatten(corpus[i].expert)};
  }
  return data;
}

struct VocabFile {
  StaticVocabulary vocab;
  std::string hash;
};

VocabFile LoadVocab(const CommandContext& ctx) {
  const fs::path path = At(ctx, ctx.config.paths.vocabulary);
  Require(path, "build-vocab");
  const std::string bytes = ReadFileBytes(path);
  VocabFile v;
  try {
    v.vocab = VocabularyFromJson(nlohmann::json::parse(bytes));
  } catch (const std::exception& e) {
    throw CommandError(kExitConfig, "bad_artifact",
                       path.string() + ": " + e.what());
  }
  v.hash = HexDigest(Fnv1a64(bytes));
  if (static_cast<int>(v.vocab.anchors.size()) !=
      ctx.config.planner.k_static) {
    throw Mismatch(path.string() + " holds " +
                   std::to_string(v.vocab.anchors.size()) +
                   " anchors but the config asks for K_s = " +
                   std::to_string(ctx.config.planner.k_static) +
                   "; rerun build-vocab");
  }
  return v;
}

// Trains one planner under `rc` and writes its checkpoint and loss history.
nlohmann::json TrainAndSave(const CommandContext& ctx, const RunConfig& rc,
                            const VocabFile& vocab,
                            const std::string& corpus_hash,
                            const std::vector<TrainExample>& data,
                            const fs::path& checkpoint) {
  PlannerModels models(rc.Decoder(), rc.Denoiser(), rc.ModelSeed());
  const std::string mask = rc.Decoder().mask.ToString();
  TrainHistory history =
      Train(models, vocab.vocab, rc.planner, data, rc.Training(),
            [&](int epoch, const LossParts& l) {
              if (!std::isfinite(l.total)) {
                throw NumericError("training loss diverged at epoch " +
                                   std::to_string(epoch));
              }
              Log(ctx, {{"event", "epoch"},
                        {"streams", mask},
                        {"epoch", epoch},
                        {"loss", l.total},
                        {"decoder", l.decoder},
                        {"noise", l.noise},
                        {"confidence", l.confidence}});
            });
  if (history.epochs.empty()) throw NumericError("training ran no epochs");
  const double first = history.epochs.front().total;
  const double last = history.epochs.back().total;

  Checkpoint ck;
  ck.metadata = {{"config_hash", ModelConfigHash(rc)},
                 {"vocab_hash", vocab.hash},
                 {"corpus_hash", corpus_hash},
                 {"stream_mask", mask},
                 {"K_d", std::to_string(rc.planner.k_dynamic)},
                 {"K_s", std::to_string(rc.planner.k_static)},
                 {"epochs", std::to_string(history.epochs.size())},
                 {"first_loss", CsvNumber(first)},
                 {"final_loss", CsvNumber(last)}};
  AddParameters(ck, models.decoder.params());
  AddParameters(ck, models.denoiser.params());
  fs::create_directories(checkpoint.parent_path());
  WriteFileBytes(checkpoint, SerializeCheckpoint(ck));

  std::string csv = "epoch,total,decoder,noise,confidence\n";
  for (size_t e = 0; e < history.epochs.size(); ++e) {
    const LossParts& l = history.epochs[e];
    csv += std::to_string(e) + "," + CsvNumber(l.total) + "," +
           CsvNumber(l.decoder) + "," + CsvNumber(l.noise) + "," +
           CsvNumber(l.confidence) + "\n";
  }
  fs::path history_path = checkpoint;
  history_path += ".history.csv";
  WriteFileBytes(history_path, csv);
  return {{"checkpoint", checkpoint.string()},
          {"checkpoint_hash", FileDigest(checkpoint)},
          {"streams", mask},
          {"K_d", rc.planner.k_dynamic},
          {"first_loss", first},
          {"final_loss", last},
          {"loss_ratio", last > 0.0 ? first / last : 0.0}};
}

std::string CorpusHash(const CommandContext& ctx) {
  const fs::path manifest = At(ctx, ctx.config.paths.dataset) / kManifest;
  Require(manifest, "gen-data");
  return FileDigest(manifest);
}

// True when `path` is a checkpoint trained under `rc` with this vocabulary.
bool CheckpointMatches(const fs::path& path, const RunConfig& rc,
                       const std::string& vocab_hash) {
  if (!fs::exists(path)) return false;
  try {
    const Checkpoint ck = ReadCheckpoint(path.string());
    return ck.metadata.count("config_hash") &&
           ck.metadata.at("config_hash") == ModelConfigHash(rc) &&
           ck.metadata.count("vocab_hash") &&
           ck.metadata.at("vocab_hash") == vocab_hash;
  } catch (const CheckpointError&) {
    return false;
  }
}

nlohmann::json WriteCorpus(const fs::path& dir, uint64_t seed,
                           int per_template) {
  std::vector<Scenario> batch = GenerateBatch(seed, per_template);
  fs::create_directories(dir);
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      fs::remove(entry.path());
    }
  }
  nlohmann::json entries = nlohmann::json::array();
  for (const Scenario& s : batch) {
    const nlohmann::json j = ToJson(s);
    ValidateScenarioJson(j);
    const std::string file = s.id + ".json";
    WriteFileBytes(dir / file, j.dump(1) + "\n");
    entries.push_back(
        {{"id", s.id}, {"template", TemplateName(s.kind)}, {"file", file}});
  }
  const nlohmann::json manifest = {{"count", batch.size()},
                                   {"per_template", per_template},
                                   {"seed", seed},
                                   {"scenarios", entries}};
  WriteFileBytes(dir / kManifest, manifest.dump(2) + "\n");
  return {{"dir", dir.string()},
          {"count", batch.size()},
          {"manifest_hash", FileDigest(dir / kManifest)}};
}

EvalResult RunEval(const Planner* planner,
                   const std::vector<Scenario>& scenarios, InitMode mode,
                   int steps, bool expert, const RunConfig& rc) {
  EvalOptions eo;
  eo.mode = mode;
  eo.steps = steps;
  eo.seed = rc.planner.seed;
  eo.expert_bypass = expert;
  EvalResult r = EvaluateCorpusParallel(planner, scenarios, eo, rc.epdms);
  CheckFinite(r);
  return r;
}

nlohmann::json AblateSteps(const CommandContext& ctx) {
  const RunConfig& rc = ctx.config;
  TrainedPlanner trained =
      LoadTrained(ctx, At(ctx, rc.paths.checkpoint), rc);
  const Planner planner = trained.MakePlanner();
  const std::vector<Scenario> scenarios = LoadCorpus(
      At(ctx, rc.paths.heldout), rc.data.eval_per_template);

  std::string csv = "mode,steps" + SubScoreColumns() + "\n";
  nlohmann::json rows = nlohmann::json::array();
  double lo = 1.0, hi = 0.0;
  auto add = [&](InitMode mode, int steps) {
    const EvalResult r = RunEval(&planner, scenarios, mode, steps, false, rc);
    csv += std::string(InitModeName(mode)) + "," + std::to_string(steps) +
           SubScoreValues(r) + "\n";
    rows.push_back({{"mode", InitModeName(mode)},
                    {"steps", steps},
                    {"EPDMS", r.summary.epdms},
                    {"mean_ade", r.mean_ade}});
    Log(ctx, rows.back());
    return r.summary.epdms;
  };
  for (int k = 1; k <= kMaxAblationSteps; ++k) {
    const double e = add(InitMode::kHybrid, k);
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  add(InitMode::kStaticOnly, rc.planner.steps);
  add(InitMode::kNoise, rc.planner.steps);

  const fs::path reports = At(ctx, rc.paths.reports);
  fs::create_directories(reports);
  WriteFileBytes(reports / "ablation_steps.csv", csv);
  const nlohmann::json summary = {{"axis", "steps"},
                                  {"count", scenarios.size()},
                                  {"rows", rows},
                                  {"hybrid_spread", hi - lo}};
  WriteFileBytes(reports / "ablation_steps.json", summary.dump(2) + "\n");
  return {{"report", (reports / "ablation_steps.csv").string()},
          {"report_hash", FileDigest(reports / "ablation_steps.csv")},
          {"hybrid_spread", hi - lo}};
}

nlohmann::json AblateHeads(const CommandContext& ctx) {
  static const char* kRowLabels[] = {"none", "+bev", "+obj", "+map", "+cmd"};
  const RunConfig& rc = ctx.config;
  const VocabFile vocab = LoadVocab(ctx);
  const std::string corpus_hash = CorpusHash(ctx);
  const std::vector<Scenario> scenarios =
      LoadCorpus(At(ctx, rc.paths.heldout));
  std::vector<TrainExample> data;

  std::string csv = "row,streams,K_d" + SubScoreColumns() + "\n";
  nlohmann::json rows = nlohmann::json::array();
  for (int level = 0; level < kNumMaskLevels; ++level) {
    RunConfig row = rc;
    row.stream_mask = StreamMask::Cumulative(level).ToString();
    if (level == 0) row.planner.k_dynamic = 0;
    const InitMode mode =
        level == 0 ? InitMode::kStaticOnly : InitMode::kHybrid;

    fs::path ckpt = At(ctx, rc.paths.ablation) /
                    ("heads_" + std::to_string(level) + ".ckpt");
    const fs::path main_ckpt = At(ctx, rc.paths.checkpoint);
    bool reused = false;
    if (CheckpointMatches(main_ckpt, row, vocab.hash)) {
      ckpt = main_ckpt;
      reused = true;
    } else if (CheckpointMatches(ckpt, row, vocab.hash)) {
      reused = true;
    } else {
      if (data.empty()) {
        data = MakeExamples(LoadCorpus(At(ctx, rc.paths.dataset)));
      }
      Log(ctx, {{"event", "train"}, {"row", kRowLabels[level]}});
      TrainAndSave(ctx, row, vocab, corpus_hash, data, ckpt);
    }
    TrainedPlanner trained = LoadTrained(ctx, ckpt, row);
    const Planner planner = trained.MakePlanner();
    const EvalResult r =
        RunEval(&planner, scenarios, mode, rc.planner.steps, false, row);
    csv += std::string(kRowLabels[level]) + "," + row.stream_mask + "," +
           std::to_string(row.planner.k_dynamic) + SubScoreValues(r) + "\n";
    rows.push_back({{"row", kRowLabels[level]},
                    {"streams", row.stream_mask},
                    {"K_d", row.planner.k_dynamic},
                    {"checkpoint", ckpt.string()},
                    {"reused", reused},
                    {"EPDMS", r.summary.epdms},
                    {"subscores", ScoresJson(r.summary)}});
    Log(ctx, rows.back());
  }
  const fs::path reports = At(ctx, rc.paths.reports);
  fs::create_directories(reports);
  WriteFileBytes(reports / "ablation_heads.csv", csv);
  const nlohmann::json summary = {
      {"axis", "heads"}, {"count", scenarios.size()}, {"rows", rows}};
  WriteFileBytes(reports / "ablation_heads.json", summary.dump(2) + "\n");
  return {{"report", (reports / "ablation_heads.csv").string()},
          {"report_hash", FileDigest(reports / "ablation_heads.csv")}};
}

std::string MarkdownScore(double v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

std::string ErrorLine(int code, const std::string& kind,
                      const std::string& message) {
  const nlohmann::json j = {{"status", "error"},
                            {"code", code},
                            {"error", kind},
                            {"message", message}};
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

ArtifactLock::ArtifactLock(const fs::path& dir) {
  const fs::path path = dir / kLockName;
  fd_ = ::open(path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
  if (fd_ < 0) {
    throw Missing("cannot open lock file " + path.string() + ": " +
                  std::strerror(errno));
  }
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw CommandError(kExitMissingPrerequisite, "artifact_dir_locked",
                       dir.string() + " is in use by another process");
  }
}

ArtifactLock::~ArtifactLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

std::string ReadFileBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Missing("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFileBytes(const fs::path& path, const std::string& bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string FileDigest(const fs::path& path) {
  return HexDigest(Fnv1a64(ReadFileBytes(path)));
}

std::vector<Scenario> LoadCorpus(const fs::path& dir, int per_template) {
  const fs::path manifest_path = dir / kManifest;
  Require(manifest_path, "gen-data");
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(ReadFileBytes(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw CommandError(kExitConfig, "bad_artifact",
                       manifest_path.string() + ": " + e.what());
  }
  std::map<std::string, int> seen;
  std::vector<fs::path> files;
  for (const auto& entry : manifest.at("scenarios")) {
    const std::string tmpl = entry.at("template").get<std::string>();
    if (per_template >= 0 && seen[tmpl]++ >= per_template) continue;
    files.push_back(dir / entry.at("file").get<std::string>());
  }
  std::vector<Scenario> out;
  out.reserve(files.size());
  for (const fs::path& f : files) {
    Require(f, "gen-data");
    try {
      out.push_back(ScenarioFromJson(nlohmann::json::parse(ReadFileBytes(f))));
    } catch (const nlohmann::json::exception& e) {
      throw CommandError(kExitConfig, "bad_artifact",
                         f.string() + ": " + e.what());
    }
  }
  return out;
}

Planner TrainedPlanner::MakePlanner() const {
  Planner p(models->decoder, models->denoiser, vocab, planner);
  return p;
}

TrainedPlanner LoadTrained(const CommandContext& ctx,
                           const fs::path& checkpoint,
                           const RunConfig& expected) {
  const VocabFile v = LoadVocab(ctx);
  Require(checkpoint, "train");
  Checkpoint ck;
  try {
    ck = ReadCheckpoint(checkpoint.string());
  } catch (const CheckpointError& e) {
    throw CommandError(kExitConfig, "bad_artifact",
                       checkpoint.string() + ": " + e.what());
  }
  auto meta = [&](const std::string& key) {
    auto it = ck.metadata.find(key);
    return it == ck.metadata.end() ? std::string() : it->second;
  };
  if (meta("vocab_hash") != v.hash) {
    throw Mismatch(checkpoint.string() +
                   " was trained with a different vocabulary; rerun train");
  }
  if (meta("config_hash") != ModelConfigHash(expected)) {
    throw Mismatch(checkpoint.string() +
                   " was trained under a different config; rerun train");
  }
  TrainedPlanner t;
  t.vocab = v.vocab;
  t.planner = expected.planner;
  t.metadata = ck.metadata;
  t.models = std::make_unique<PlannerModels>(
      expected.Decoder(), expected.Denoiser(), expected.ModelSeed());
  try {
    LoadParameters(ck, t.models->decoder.params());
    LoadParameters(ck, t.models->denoiser.params());
  } catch (const CheckpointError& e) {
    throw CommandError(kExitConfig, "bad_artifact",
                       checkpoint.string() + ": " + e.what());
  }
  return t;
}

nlohmann::json CmdGenData(const CommandContext& ctx) {
  const RunConfig& rc = ctx.config;
  nlohmann::json train = WriteCorpus(At(ctx, rc.paths.dataset), rc.DataSeed(),
                                     rc.data.train_per_template);
  nlohmann::json held = WriteCorpus(At(ctx, rc.paths.heldout),
                                    rc.HeldoutSeed(),
                                    rc.data.heldout_per_template);
  return {{"dataset", train}, {"heldout", held}};
}

nlohmann::json CmdBuildVocab(const CommandContext& ctx) {
  const RunConfig& rc = ctx.config;
  const std::string corpus_hash = CorpusHash(ctx);
  const std::vector<Scenario> corpus = LoadCorpus(At(ctx, rc.paths.dataset));
  std::vector<FlatTrajectory> points;
  points.reserve(corpus.size());
  for (const Scenario& s : corpus) points.push_back(Flatten(s.expert));
  StaticVocabulary vocab;
  try {
    vocab = KMeans(points, rc.Clustering());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("build-vocab: ") + e.what());
  }
  if (!std::isfinite(vocab.inertia)) {
    throw NumericError("k-means produced a non-finite inertia");
  }
  vocab.corpus_hash = corpus_hash;
  const fs::path path = At(ctx, rc.paths.vocabulary);
  WriteFileBytes(path, ToJson(vocab).dump(2) + "\n");
  return {{"vocabulary", path.string()},
          {"vocab_hash", FileDigest(path)},
          {"corpus_hash", corpus_hash},
          {"K", vocab.anchors.size()},
          {"inertia", vocab.inertia},
          {"iterations", vocab.iterations}};
}

nlohmann::json CmdTrain(const CommandContext& ctx) {
  const RunConfig& rc = ctx.config;
  const std::string corpus_hash = CorpusHash(ctx);
  const VocabFile vocab = LoadVocab(ctx);
  if (vocab.vocab.corpus_hash != corpus_hash) {
    throw Mismatch("vocabulary was built from a different corpus; rerun "
                   "build-vocab");
  }
  const std::vector<TrainExample> data =
      MakeExamples(LoadCorpus(At(ctx, rc.paths.dataset)));
  nlohmann::json result = TrainAndSave(ctx, rc, vocab, corpus_hash, data,
                                       At(ctx, rc.paths.checkpoint));
  const fs::path reports = At(ctx, rc.paths.reports);
  fs::create_directories(reports);
  fs::path history = At(ctx, rc.paths.checkpoint);
  history += ".history.csv";
  fs::copy_file(history, reports / "train_history.csv",
                fs::copy_options::overwrite_existing);
  result["vocab_hash"] = vocab.hash;
  result["corpus_hash"] = corpus_hash;
  return result;
}

nlohmann::json CmdEval(const CommandContext& ctx, const EvalRequest& req) {
  const RunConfig& rc = ctx.config;
  const int steps = req.steps.value_or(rc.planner.steps);
  if (steps < 0) throw ConfigError("eval: --steps must be >= 0");
  const std::vector<Scenario> scenarios = LoadCorpus(
      At(ctx, rc.paths.heldout), rc.data.eval_per_template);
  EvalResult r;
  std::string label;
  if (req.expert) {
    label = "eval_expert";
    r = RunEval(nullptr, scenarios, req.mode, steps, true, rc);
  } else {
    label = StepsLabel(req.mode, steps);
    TrainedPlanner trained =
        LoadTrained(ctx, At(ctx, rc.paths.checkpoint), rc);
    const Planner planner = trained.MakePlanner();
    r = RunEval(&planner, scenarios, req.mode, steps, false, rc);
  }
  const fs::path reports = At(ctx, rc.paths.reports);
  fs::create_directories(reports);
  const fs::path csv = reports / (label + ".csv");
  WriteFileBytes(csv, ReportCsv(r));
  nlohmann::json summary = SummaryJson(label, scenarios, r);
  summary["mode"] = req.expert ? "expert" : InitModeName(req.mode);
  summary["steps"] = req.expert ? 0 : steps;
  WriteFileBytes(reports / (label + ".json"), summary.dump(2) + "\n");
  return {{"report", csv.string()},
          {"report_hash", FileDigest(csv)},
          {"count", r.summary.count},
          {"EPDMS", r.summary.epdms},
          {"per_template", summary["per_template"]}};
}

nlohmann::json CmdAblate(const CommandContext& ctx, AblationAxis axis) {
  return axis == AblationAxis::kSteps ? AblateSteps(ctx) : AblateHeads(ctx);
}

nlohmann::json CmdRender(const CommandContext& ctx, const RenderRequest& req) {
  const RunConfig& rc = ctx.config;
  const int steps = req.steps.value_or(rc.planner.steps);
  if (steps < 0) throw ConfigError("render: --steps must be >= 0");
  std::optional<Scenario> scenario;
  for (const std::string& dir : {rc.paths.heldout, rc.paths.dataset}) {
    const fs::path file = At(ctx, dir) / (req.id + ".json");
    if (req.id.find('/') == std::string::npos && fs::exists(file)) {
      scenario = ScenarioFromJson(nlohmann::json::parse(ReadFileBytes(file)));
      break;
    }
  }
  if (!scenario) {
    Require(At(ctx, rc.paths.heldout) / kManifest, "gen-data");
    throw CommandError(kExitConfig, "unknown_scenario",
                       "no scenario with id '" + req.id + "'");
  }
  TrainedPlanner trained = LoadTrained(ctx, At(ctx, rc.paths.checkpoint), rc);
  const Planner planner = trained.MakePlanner();
  const PerceptionBundle p = ExtractPerception(*scenario);
  const AnchorSet anchors = planner.Anchors(p, req.mode);
  const PlanResult plan = planner.Plan(
      p, req.mode, steps, ScenarioPlanSeed(rc.planner.seed, scenario->id));
  const fs::path dir = At(ctx, rc.paths.renders);
  fs::create_directories(dir);
  const fs::path svg = dir / (scenario->id + ".svg");
  WriteFileBytes(svg, RenderSvg(*scenario, anchors, plan));
  return {{"render", svg.string()},
          {"render_hash", FileDigest(svg)},
          {"anchors", anchors.size()},
          {"selected", plan.selected}};
}

nlohmann::json CmdReport(const CommandContext& ctx) {
  const fs::path reports = At(ctx, ctx.config.paths.reports);
  std::vector<fs::path> evals;
  if (fs::exists(reports)) {
    for (const auto& e : fs::directory_iterator(reports)) {
      const std::string name = e.path().filename().string();
      if (name.rfind("eval_", 0) == 0 && e.path().extension() == ".json") {
        evals.push_back(e.path());
      }
    }
  }
  std::sort(evals.begin(), evals.end());
  if (evals.empty()) {
    throw Missing("no evaluation summaries in " + reports.string() +
                  "; run `eval` first");
  }
  std::ostringstream md;
  md << "# anchorplan report\n\n## Evaluations\n\n"
     << "| run | scenarios | EPDMS | ADE |";
  for (SubScoreId id : kColumnOrder) md << " " << SubScoreName(id) << " |";
  md << "\n|---|---|---|---|";
  for (size_t i = 0; i < kColumnOrder.size(); ++i) md << "---|";
  md << "\n";
  std::vector<nlohmann::json> summaries;
  for (const fs::path& f : evals) {
    summaries.push_back(nlohmann::json::parse(ReadFileBytes(f)));
    const nlohmann::json& j = summaries.back();
    md << "| " << j.at("label").get<std::string>() << " | "
       << j.at("count").get<int>() << " | "
       << MarkdownScore(j.at("EPDMS").get<double>()) << " | "
       << MarkdownScore(j.at("mean_ade").get<double>()) << " |";
    for (SubScoreId id : kColumnOrder) {
      md << " "
         << MarkdownScore(
                j.at("subscores").at(std::string(SubScoreName(id))).get<double>())
         << " |";
    }
    md << "\n";
  }
  md << "\n## Per template EPDMS\n\n| run |";
  for (Template t : kAllTemplates) md << " " << TemplateName(t) << " |";
  md << "\n|---|";
  for (size_t i = 0; i < kAllTemplates.size(); ++i) md << "---|";
  md << "\n";
  for (const nlohmann::json& j : summaries) {
    md << "| " << j.at("label").get<std::string>() << " |";
    for (Template t : kAllTemplates) {
      const std::string name(TemplateName(t));
      const auto& per = j.at("per_template");
      md << " "
         << (per.contains(name)
                 ? MarkdownScore(per.at(name).at("EPDMS").get<double>())
                 : std::string("-"))
         << " |";
    }
    md << "\n";
  }
  for (const char* axis : {"steps", "heads"}) {
    const fs::path f = reports / (std::string("ablation_") + axis + ".json");
    if (!fs::exists(f)) continue;
    const nlohmann::json j = nlohmann::json::parse(ReadFileBytes(f));
    md << "\n## Ablation: " << axis << " (" << j.at("count").get<int>()
       << " scenarios)\n\n";
    if (std::string(axis) == "steps") {
      md << "| mode | steps | EPDMS | ADE |\n|---|---|---|---|\n";
      for (const auto& r : j.at("rows")) {
        md << "| " << r.at("mode").get<std::string>() << " | "
           << r.at("steps").get<int>() << " | "
           << MarkdownScore(r.at("EPDMS").get<double>()) << " | "
           << MarkdownScore(r.at("mean_ade").get<double>()) << " |\n";
      }
    } else {
      md << "| row | streams | K_d | EPDMS | NC |\n|---|---|---|---|---|\n";
      for (const auto& r : j.at("rows")) {
        md << "| " << r.at("row").get<std::string>() << " | "
           << r.at("streams").get<std::string>() << " | "
           << r.at("K_d").get<int>() << " | "
           << MarkdownScore(r.at("EPDMS").get<double>()) << " | "
           << MarkdownScore(r.at("subscores").at("NC").get<double>())
           << " |\n";
      }
    }
  }
  const fs::path out = reports / "report.md";
  WriteFileBytes(out, md.str());
  return {{"report", out.string()}, {"report_hash", FileDigest(out)}};
}

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"anchorplan: anchor-initialized truncated diffusion planner"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path;
  uint64_t seed = 0;
  std::string out_dir = ".";
  int jobs = 0;
  app.add_option("--config", config_path, "JSON run config");
  CLI::Option* seed_opt = app.add_option("--seed", seed, "base seed");
  app.add_option("--out", out_dir, "artifact directory");
  app.add_option("--jobs", jobs, "OpenMP threads (0 keeps the default)")
      ->check(CLI::NonNegativeNumber);

  const std::vector<std::string> modes = {"hybrid", "static", "noise"};
  CLI::App* gen = app.add_subcommand("gen-data", "generate scenario corpora");
  CLI::App* vocab = app.add_subcommand("build-vocab", "cluster expert plans");
  CLI::App* train = app.add_subcommand("train", "train the planner");

  CLI::App* eval = app.add_subcommand("eval", "score the held-out corpus");
  std::string eval_mode = "hybrid";
  int eval_steps = -1;
  bool eval_expert = false;
  eval->add_option("--init", eval_mode, "candidate initialization")
      ->check(CLI::IsMember(modes));
  eval->add_option("--steps", eval_steps, "reverse steps")
      ->check(CLI::NonNegativeNumber);
  eval->add_flag("--expert", eval_expert, "score the expert plans");

  CLI::App* ablate = app.add_subcommand("ablate", "run an ablation sweep");
  std::string axis;
  ablate->add_option("--axis", axis, "steps or heads")
      ->required()
      ->check(CLI::IsMember({"steps", "heads"}));

  CLI::App* render = app.add_subcommand("render", "draw one scenario as SVG");
  std::string render_id;
  std::string render_mode = "hybrid";
  int render_steps = -1;
  render->add_option("--id", render_id, "scenario id")->required();
  render->add_option("--init", render_mode, "candidate initialization")
      ->check(CLI::IsMember(modes));
  render->add_option("--steps", render_steps, "reverse steps")
      ->check(CLI::NonNegativeNumber);

  CLI::App* report = app.add_subcommand("report", "summarize reports");

  std::vector<const char*> argv = {"anchorplan"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << ErrorLine(kExitConfig, "usage", e.what()) << "\n";
    return kExitConfig;
  }

  CLI::App* verb = app.get_subcommands().front();
  const std::string name = verb->get_name();
  try {
    CommandContext ctx;
    if (!config_path.empty()) ctx.config = LoadRunConfig(config_path);
    if (seed_opt->count() > 0) ctx.config.SetSeed(seed);
    ctx.config.Validate();
    ctx.out = out_dir;
    ctx.log = &err;
    if (jobs > 0) omp_set_num_threads(jobs);
    fs::create_directories(ctx.out);
    ArtifactLock lock(ctx.out);
    WriteFileBytes(ctx.out / kRunConfigName,
                   CanonicalJson(ctx.config) + "\n");

    nlohmann::json result;
    if (verb == gen) {
      result = CmdGenData(ctx);
    } else if (verb == vocab) {
      result = CmdBuildVocab(ctx);
    } else if (verb == train) {
      result = CmdTrain(ctx);
    } else if (verb == eval) {
      EvalRequest req;
      req.mode = InitModeFromName(eval_mode);
      if (eval_steps >= 0) req.steps = eval_steps;
      req.expert = eval_expert;
      result = CmdEval(ctx, req);
    } else if (verb == ablate) {
      result = CmdAblate(
          ctx, axis == "steps" ? AblationAxis::kSteps : AblationAxis::kHeads);
    } else if (verb == render) {
      RenderRequest req;
      req.id = render_id;
      req.mode = InitModeFromName(render_mode);
      if (render_steps >= 0) req.steps = render_steps;
      result = CmdRender(ctx, req);
    } else if (verb == report) {
      result = CmdReport(ctx);
    }
    result["status"] = "ok";
    result["command"] = name;
    result["config_hash"] = ModelConfigHash(ctx.config);
    out << result.dump() << "\n" << std::flush;
    return kExitOk;
  } catch (const CommandError& e) {
    err << ErrorLine(e.code(), e.kind(), e.what()) << "\n";
    return e.code();
  } catch (const ConfigError& e) {
    err << ErrorLine(kExitConfig, "config", e.what()) << "\n";
    return kExitConfig;
  } catch (const NumericError& e) {
    err << ErrorLine(kExitNumeric, "numeric", e.what()) << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << ErrorLine(1, "internal", e.what()) << "\n";
    return 1;
  }
}

}  // namespace anchorplan
