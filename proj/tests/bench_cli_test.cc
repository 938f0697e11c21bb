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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "anchorplan/commands.h"
#include "anchorplan/render.h"
#include "anchorplan/run_config.h"
#include "json.hpp"
#include "model_fixture.h"
#include "test_util.h"

namespace anchorplan {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Run config.

TEST(RunConfig, JsonRoundTripIsCanonical) {
  RunConfig c;
  c.SetSeed(42);
  c.data.train_per_template = 12;
  c.train.epochs = 3;
  const RunConfig back = RunConfigFromJson(ToJson(c));
  EXPECT_EQ(CanonicalJson(back), CanonicalJson(c));
  EXPECT_EQ(back.seed, 42u);
  EXPECT_EQ(back.planner.seed, c.planner.seed);
  EXPECT_EQ(ModelConfigHash(back), ModelConfigHash(c));
}

TEST(RunConfig, DerivedSeedsAreDistinct) {
  RunConfig c;
  c.SetSeed(10);
  const std::vector<uint64_t> seeds = {c.DataSeed(), c.HeldoutSeed(),
                                       c.ModelSeed(), c.TrainSeed(),
                                       c.VocabSeed()};
  for (size_t i = 0; i < seeds.size(); ++i) {
    for (size_t j = i + 1; j < seeds.size(); ++j) EXPECT_NE(seeds[i], seeds[j]);
  }
  EXPECT_EQ(c.Training().seed, c.TrainSeed());
  EXPECT_EQ(c.Clustering().seed, c.VocabSeed());
}

TEST(RunConfig, UnknownKeyIsRejected) {
  EXPECT_THROW(RunConfigFromJson(json{{"trian", {{"epochs", 2}}}}),
               ConfigError);
  EXPECT_THROW(RunConfigFromJson(json{{"train", {{"epoch", 2}}}}), ConfigError);
}

TEST(RunConfig, ArtifactPathsMustStayInsideOutputDir) {
  for (const char* bad : {"/etc/passwd", "../up", ".", "a/../../b", ""}) {
    RunConfig c;
    c.paths.dataset = bad;
    EXPECT_THROW(c.Validate(), ConfigError) << bad;
  }
  RunConfig ok;
  ok.paths.dataset = "sub/dir";
  EXPECT_NO_THROW(ok.Validate());
}

TEST(RunConfig, ModelHashTracksModelFields) {
  RunConfig a;
  RunConfig b;
  b.planner.k_static = 8;
  EXPECT_NE(ModelConfigHash(a), ModelConfigHash(b));
}

// Rendering.

struct SvgPolyline {
  std::string attrs;
  std::vector<Vec2> points;
};

std::vector<SvgPolyline> Polylines(const std::string& svg) {
  std::vector<SvgPolyline> out;
  const std::regex re("<polyline ([^>]*?) points=\"([^\"]*)\"/>");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re);
       it != std::sregex_iterator(); ++it) {
    SvgPolyline p;
    p.attrs = (*it)[1];
    std::istringstream in((*it)[2].str());
    std::string pair;
    while (in >> pair) {
      const size_t comma = pair.find(',');
      p.points.push_back({std::stod(pair.substr(0, comma)),
                          std::stod(pair.substr(comma + 1))});
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::string Attribute(const std::string& svg, const std::string& name) {
  const std::regex re(name + "=\"([^\"]*)\"");
  std::smatch m;
  return std::regex_search(svg, m, re) ? m[1].str() : "";
}

TEST(RenderSvg, DrawsEveryAnchorAndInvertibleSelection) {
  testing::SmallWorld w(3);
  const Planner p(w.models.decoder, w.models.denoiser, w.vocab, w.pc);
  const Scenario& s = w.corpus[7];
  const PerceptionBundle bundle = ExtractPerception(s);
  const AnchorSet anchors = p.Anchors(bundle, InitMode::kHybrid);
  const PlanResult plan = p.Plan(bundle, InitMode::kHybrid, 2, 1);
  const std::string svg = RenderSvg(s, anchors, plan);

  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  const double width = std::stod(Attribute(svg, "width"));
  const double height = std::stod(Attribute(svg, "height"));
  const ViewTransform t =
      ViewTransform::FromAttribute(Attribute(svg, "data-transform"));

  int n_anchor = 0, n_dynamic = 0;
  const SvgPolyline* selected = nullptr;
  const std::vector<SvgPolyline> lines = Polylines(svg);
  for (const SvgPolyline& l : lines) {
    if (l.attrs.find("class=\"anchor ") != std::string::npos) {
      ++n_anchor;
      n_dynamic += l.attrs.find("dynamic") != std::string::npos;
      for (const Vec2& q : l.points) {
        EXPECT_TRUE(std::isfinite(q.x) && std::isfinite(q.y));
        EXPECT_GE(q.x, 0.0);
        EXPECT_LE(q.x, width);
        EXPECT_GE(q.y, 0.0);
        EXPECT_LE(q.y, height);
      }
    }
    if (l.attrs.find("id=\"selected\"") != std::string::npos) selected = &l;
  }
  EXPECT_EQ(n_anchor, 20);
  EXPECT_EQ(n_dynamic, 4);
  ASSERT_NE(selected, nullptr);
  const FlatTrajectory& chosen = plan.candidates[plan.selected];
  ASSERT_EQ(int(selected->points.size()), chosen.horizon());
  for (int i = 0; i < chosen.horizon(); ++i) {
    const Vec2 world = t.Invert(selected->points[i]);
    const Vec2 expect = ToWorld({chosen.x(i), chosen.y(i)},
                                {s.ego_start.x, s.ego_start.y},
                                s.ego_start.heading);
    EXPECT_NEAR(world.x, expect.x, 1e-5);
    EXPECT_NEAR(world.y, expect.y, 1e-5);
  }
}

TEST(ViewTransform, AttributeRoundTripAndInverse) {
  ViewTransform t;
  t.a = 8;
  t.d = -8;
  t.e = 12.5;
  t.f = 300.25;
  const ViewTransform back = ViewTransform::FromAttribute(t.ToAttribute());
  const Vec2 p{3.5, -7.25};
  const Vec2 q = back.Invert(back.Apply(p));
  EXPECT_NEAR(q.x, p.x, 1e-12);
  EXPECT_NEAR(q.y, p.y, 1e-12);
  EXPECT_THROW(ViewTransform::FromAttribute("1 2 3"), std::invalid_argument);
}

// Command line.

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult Cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

// Last JSON line of a stream.
json LastJson(const std::string& text) {
  std::istringstream in(text);
  std::string line, last;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '{') last = line;
  }
  return json::parse(last);
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

int CountLines(const fs::path& p) {
  std::istringstream in(Slurp(p));
  std::string line;
  int n = 0;
  while (std::getline(in, line)) n += !line.empty();
  return n;
}

void WriteSmallConfig(const fs::path& path) {
  std::ofstream(path) << json{{"data",
                               {{"train_per_template", 10},
                                {"heldout_per_template", 4},
                                {"eval_per_template", 2}}},
                              {"train", {{"epochs", 2}}}}
                             .dump();
}

class CliPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing::TempDir("cli_pipeline");
    cfg_ = (dir_->path() / "cfg.json").string();
    out_ = (dir_->path() / "out").string();
    WriteSmallConfig(cfg_);
    for (const char* verb : {"gen-data", "build-vocab", "train"}) {
      const CliResult r = Cli({"--config", cfg_, "--out", out_, verb});
      ASSERT_EQ(r.code, 0) << verb << ": " << r.err;
    }
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  static CliResult Run(std::vector<std::string> tail) {
    std::vector<std::string> args = {"--config", cfg_, "--out", out_};
    args.insert(args.end(), tail.begin(), tail.end());
    return Cli(args);
  }

  static testing::TempDir* dir_;
  static std::string cfg_;
  static std::string out_;
};

testing::TempDir* CliPipeline::dir_ = nullptr;
std::string CliPipeline::cfg_;
std::string CliPipeline::out_;

TEST_F(CliPipeline, GenDataWritesManifestAndIsRepeatable) {
  const fs::path manifest = fs::path(out_) / "dataset" / "manifest.json";
  const json m = json::parse(Slurp(manifest));
  EXPECT_EQ(m.at("count"), 60);
  EXPECT_EQ(json::parse(Slurp(fs::path(out_) / "heldout" / "manifest.json"))
                .at("count"),
            24);
  const std::string before = Slurp(manifest);
  testing::TempDir other("cli_regen");
  const CliResult r =
      Cli({"--config", cfg_, "--out", other.path().string(), "gen-data"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Slurp(other.path() / "dataset" / "manifest.json"), before);
  const json ok = LastJson(r.out);
  EXPECT_EQ(ok.at("status"), "ok");
  EXPECT_EQ(ok.at("command"), "gen-data");
}

TEST_F(CliPipeline, TrainRecordsHistoryAndCheckpoint) {
  EXPECT_TRUE(fs::exists(fs::path(out_) / "model.ckpt"));
  EXPECT_TRUE(fs::exists(fs::path(out_) / "vocab.json"));
  EXPECT_EQ(CountLines(fs::path(out_) / "reports" / "train_history.csv"), 3);
}

TEST_F(CliPipeline, EvalWritesReportWithOneRowPerScenario) {
  const CliResult r = Run({"eval", "--init", "hybrid", "--steps", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const fs::path csv = fs::path(out_) / "reports" / "eval_hybrid_steps2.csv";
  ASSERT_TRUE(fs::exists(csv));
  EXPECT_GE(CountLines(csv), 13);
  const std::string first = Slurp(csv);
  ASSERT_EQ(Run({"eval", "--init", "hybrid", "--steps", "2"}).code, 0);
  EXPECT_EQ(Slurp(csv), first);
}

TEST_F(CliPipeline, ExpertEvalScoresHigh) {
  const CliResult r = Run({"eval", "--expert"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j =
      json::parse(Slurp(fs::path(out_) / "reports" / "eval_expert.json"));
  EXPECT_GE(j.at("EPDMS").get<double>(), 0.9);
}

TEST_F(CliPipeline, StepsAblationEmitsSevenRows) {
  const CliResult r = Run({"ablate", "--axis", "steps"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(CountLines(fs::path(out_) / "reports" / "ablation_steps.csv"), 8);
}

TEST_F(CliPipeline, HeadsAblationEmitsFiveRows) {
  const CliResult r = Run({"ablate", "--axis", "heads"});
  ASSERT_EQ(r.code, 0) << r.err;
  const fs::path csv = fs::path(out_) / "reports" / "ablation_heads.csv";
  EXPECT_EQ(CountLines(csv), 6);
  const std::string text = Slurp(csv);
  for (const char* row : {"\nnone,", "\n+bev,", "\n+obj,", "\n+map,", "\n+cmd,"}) {
    EXPECT_NE(text.find(row), std::string::npos) << row;
  }
}

TEST_F(CliPipeline, RenderWritesSvgForHeldOutScenario) {
  const json m =
      json::parse(Slurp(fs::path(out_) / "heldout" / "manifest.json"));
  const std::string id = m.at("scenarios")[0].at("id");
  const CliResult r = Run({"render", "--id", id});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string svg = Slurp(fs::path(out_) / "renders" / (id + ".svg"));
  EXPECT_NE(svg.find("id=\"selected\""), std::string::npos);

  const CliResult bad = Run({"render", "--id", "no_such_scenario"});
  EXPECT_EQ(bad.code, kExitConfig);
  EXPECT_EQ(LastJson(bad.err).at("status"), "error");
}

TEST_F(CliPipeline, ReportSummarizesEvaluations) {
  ASSERT_EQ(Run({"eval"}).code, 0);
  const CliResult r = Run({"report"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_FALSE(Slurp(fs::path(out_) / "reports" / "report.md").empty());
}

TEST_F(CliPipeline, HeldLockBlocksCommands) {
  ArtifactLock lock{fs::path(out_)};
  const CliResult r = Run({"eval"});
  EXPECT_EQ(r.code, kExitMissingPrerequisite);
  const json e = LastJson(r.err);
  EXPECT_EQ(e.at("error"), "artifact_dir_locked");
}

TEST_F(CliPipeline, CheckpointFromDifferentConfigIsRejected) {
  testing::TempDir tmp("cli_mismatch");
  const fs::path cfg = tmp.path() / "k8.json";
  std::ofstream(cfg) << json{{"data",
                              {{"train_per_template", 10},
                               {"heldout_per_template", 4},
                               {"eval_per_template", 2}}},
                             {"train", {{"epochs", 2}}},
                             {"planner", {{"k_static", 8}}}}
                            .dump();
  const CliResult r =
      Cli({"--config", cfg.string(), "--out", out_, "eval"});
  EXPECT_EQ(r.code, kExitConfig) << r.err;
}

TEST(Cli, MissingPrerequisitesExitWithThree) {
  testing::TempDir tmp("cli_missing");
  const fs::path cfg = tmp.path() / "cfg.json";
  WriteSmallConfig(cfg);
  const std::string out = (tmp.path() / "out").string();
  for (const char* verb : {"build-vocab", "train", "eval", "report"}) {
    const CliResult r = Cli({"--config", cfg.string(), "--out", out, verb});
    EXPECT_EQ(r.code, kExitMissingPrerequisite) << verb;
    const json e = LastJson(r.err);
    EXPECT_EQ(e.at("status"), "error");
    EXPECT_EQ(e.at("code"), kExitMissingPrerequisite);
  }
}

TEST(Cli, UsageAndConfigErrorsExitWithTwo) {
  testing::TempDir tmp("cli_usage");
  const std::string out = (tmp.path() / "out").string();
  EXPECT_EQ(Cli({"--out", out, "fly"}).code, kExitConfig);
  EXPECT_EQ(Cli({"--out", out, "ablate"}).code, kExitConfig);
  EXPECT_EQ(Cli({"--out", out, "eval", "--init", "magic"}).code, kExitConfig);
  EXPECT_EQ(Cli({"--out", out, "--config", "/nonexistent.json", "gen-data"})
                .code,
            kExitConfig);
  const fs::path bad = tmp.path() / "bad.json";
  std::ofstream(bad) << R"({"train": {"epochs": -3}})";
  const CliResult r = Cli({"--out", out, "--config", bad.string(), "gen-data"});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_EQ(LastJson(r.err).at("code"), kExitConfig);
}

TEST(Cli, ErrorLineIsMachineReadable) {
  const json e = json::parse(ErrorLine(3, "missing_prerequisite", "no \"x\""));
  EXPECT_EQ(e.at("code"), 3);
  EXPECT_EQ(e.at("error"), "missing_prerequisite");
  EXPECT_EQ(e.at("message"), "no \"x\"");
  EXPECT_EQ(e.at("status"), "error");
}

}  // namespace
}  // namespace anchorplan
