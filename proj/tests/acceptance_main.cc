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

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails. An optional argument names a directory that
// keeps the full-scale artifacts; otherwise a temporary one is used.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "anchorplan/commands.h"
#include "anchorplan/epdms.h"
#include "anchorplan/noise_schedule.h"
#include "json.hpp"
#include "model_fixture.h"
#include "test_util.h"

namespace anchorplan {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

int failures = 0;

void Report(const std::string& label, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::cout << label << ": " << (pass ? "PASS" : "FAIL") << "  " << detail
            << std::endl;
}

std::string Fmt(const char* f, double a, double b = 0, double c = 0,
                double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c, d);
  return buf;
}

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

json ReadJson(const fs::path& p) { return json::parse(Slurp(p)); }

// Runs one CLI verb; returns its result line or throws with stderr.
json Cli(const fs::path& out, const std::vector<std::string>& tail,
         const std::string& config = "") {
  std::vector<std::string> args = {"--out", out.string()};
  if (!config.empty()) {
    args.push_back("--config");
    args.push_back(config);
  }
  args.insert(args.end(), tail.begin(), tail.end());
  std::ostringstream o, e;
  const int code = RunCli(args, o, e);
  if (code != 0) {
    throw std::runtime_error("command '" + tail[0] + "' exited " +
                             std::to_string(code) + ": " + e.str());
  }
  std::istringstream lines(o.str());
  std::string line, last;
  while (std::getline(lines, line)) {
    if (!line.empty()) last = line;
  }
  return json::parse(last);
}

void ForwardStatistics() {
  const auto start = Clock::now();
  const NoiseSchedule s;
  const std::vector<double> x0 = {2.5};
  double worst = 0.0;
  for (int t : {10, 50, 90}) {
    Rng rng(1000 + t);
    const int n = 10000;
    double sum = 0.0, sq = 0.0;
    for (int k = 0; k < n; ++k) {
      const std::vector<double> eps = {rng.Normal()};
      const double v = ForwardNoise(x0, t, eps, s)[0];
      sum += v;
      sq += v * v;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    const double ab = s.AlphaBar(t);
    worst = std::max({worst, std::abs(mean / (std::sqrt(ab) * x0[0]) - 1.0),
                      std::abs(var / (1.0 - ab) - 1.0)});
  }
  const double secs = Seconds(start);
  Report("criterion 1 (forward noising statistics)", worst < 0.05 && secs < 10,
         Fmt("worst relative error %.4f, %.2f s", worst, secs));
}

void GradientFidelity() {
  testing::SmallWorld w(3);
  const double err = testing::FullLossGradientError(w, w.data[5], 50, 77);
  Report("criterion 2 (full loss gradients)", err < 1e-4,
         Fmt("worst relative error %.3g over 50 parameters", err));
}

double BruteForceTwoMeans(const std::vector<FlatTrajectory>& pts) {
  const int n = static_cast<int>(pts.size());
  double best = std::numeric_limits<double>::infinity();
  for (int mask = 1; mask < (1 << n) - 1; ++mask) {
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) labels[i] = (mask >> i) & 1;
    best = std::min(best, Wcss(pts, labels, 2));
  }
  return best;
}

void KMeansOracle() {
  Rng rng(2026);
  int matched = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + static_cast<int>(rng.UniformInt(6));
    std::vector<FlatTrajectory> pts;
    for (int i = 0; i < n; ++i) pts.push_back(testing::RandomFlat(rng, 2, 3.0));
    KMeansOptions o;
    o.k = 2;
    o.seed = trial;
    o.restarts = 32;
    const double gap = KMeans(pts, o).inertia - BruteForceTwoMeans(pts);
    worst = std::max(worst, std::abs(gap));
    matched += std::abs(gap) < 1e-9;
  }
  Report("criterion 3 (k-means vs exhaustive 2-partition)", matched == 20,
         Fmt("%.0f/20 instances matched, worst gap %.2g", matched, worst));
}

void EpdmsExactness() {
  bool grid = true;
  const double values[] = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
  for (double a : values) {
    for (double h : values) grid = grid && Filter(a, h) == (h == 0.0 ? 1.0 : a);
  }
  ScoreVector v;
  v.fill(1.0);
  v[int(SubScoreId::kEP)] = 0.5;
  const double example = Epdms(v, EpdmsConfig{});
  bool zero = true;
  for (SubScoreId p : kPenaltyScores) {
    ScoreVector z = v;
    z[int(p)] = 0.0;
    zero = zero && Epdms(z, EpdmsConfig{}) == 0.0;
  }
  Report("criterion 4 (filter grid, aggregation, zero penalty)",
         grid && std::abs(example - 0.84375) < 1e-12 && zero,
         std::string("grid ") + (grid ? "ok" : "mismatch") + ", example " +
             Fmt("%.12f", example) + ", zero penalty " +
             (zero ? "ok" : "nonzero"));
}

// Small pipeline repeated in two directories; report CSVs must be equal.
void Determinism(const fs::path& root) {
  const fs::path cfg = root / "small.json";
  std::ofstream(cfg) << json{{"data",
                              {{"train_per_template", 12},
                               {"heldout_per_template", 4},
                               {"eval_per_template", 4}}},
                             {"train", {{"epochs", 2}}}}
                            .dump();
  std::vector<std::string> digests[2];
  for (int run = 0; run < 2; ++run) {
    const fs::path out = root / ("determinism_" + std::to_string(run));
    for (const char* verb : {"gen-data", "build-vocab", "train"}) {
      Cli(out, {verb}, cfg.string());
    }
    for (const char* mode : {"hybrid", "static", "noise"}) {
      Cli(out, {"eval", "--init", mode}, cfg.string());
    }
    for (const auto& e : fs::directory_iterator(out / "reports")) {
      if (e.path().extension() == ".csv") {
        digests[run].push_back(e.path().filename().string() + ":" +
                               Slurp(e.path()));
      }
    }
    std::sort(digests[run].begin(), digests[run].end());
  }
  Report("criterion 9 (bit-identical reports on rerun)",
         !digests[0].empty() && digests[0] == digests[1],
         Fmt("%.0f report CSVs compared", double(digests[0].size())));
}

void FullPipeline(const fs::path& out) {
  const auto start = Clock::now();
  Cli(out, {"gen-data"});
  Cli(out, {"build-vocab"});
  const json trained = Cli(out, {"train"});
  json eval[3];
  const char* modes[3] = {"hybrid", "static", "noise"};
  for (int m = 0; m < 3; ++m) {
    Cli(out, {"eval", "--init", modes[m], "--steps", "2"});
    eval[m] = ReadJson(out / "reports" /
                       (std::string("eval_") + modes[m] + "_steps2.json"));
  }
  const double core_secs = Seconds(start);

  const double e_h = eval[0].at("EPDMS"), e_s = eval[1].at("EPDMS"),
               e_n = eval[2].at("EPDMS");
  const double a_h = eval[0].at("mean_ade"), a_n = eval[2].at("mean_ade");
  const int count = eval[0].at("count");
  Report("criterion 5 (hybrid beats noise on ADE; hybrid > static > noise)",
         count == 300 && a_h < a_n && e_h > e_s && e_s > e_n &&
             core_secs <= 1800,
         Fmt("ADE %.3f vs %.3f; EPDMS %.4f > ", a_h, a_n, e_h) +
             Fmt("%.4f > %.4f on %.0f scenarios; ", e_s, e_n, count) +
             Fmt("pipeline %.0f s", core_secs));

  Cli(out, {"ablate", "--axis", "steps"});
  const json steps = ReadJson(out / "reports" / "ablation_steps.json");
  double lo = 1e9, hi = -1e9;
  int best_step = -1;
  std::string curve;
  for (const json& r : steps.at("rows")) {
    if (r.at("mode") != "hybrid") continue;
    const double e = r.at("EPDMS");
    lo = std::min(lo, e);
    if (e > hi) {
      hi = e;
      best_step = r.at("steps");
    }
    curve += Fmt("%.4f ", e);
  }
  Report("criterion 6 (steps 1-5 flat within one point)",
         hi - lo <= 0.01 && best_step < 5,
         "EPDMS by steps: " + curve +
             Fmt("spread %.4f, best at steps %.0f", hi - lo, best_step));

  Cli(out, {"ablate", "--axis", "heads"});
  const json heads = ReadJson(out / "reports" / "ablation_heads.json");
  const json& rows = heads.at("rows");
  double worst_inc = 1e9;
  std::string table;
  double nc_bev = 0.0, nc_obj = 0.0;
  for (size_t i = 0; i < rows.size(); ++i) {
    const double e = rows[i].at("EPDMS");
    table += rows[i].at("row").get<std::string>() + Fmt("=%.4f ", e);
    if (i > 0) worst_inc = std::min(worst_inc, e - rows[i - 1].at("EPDMS").get<double>());
    if (rows[i].at("row") == "+bev") nc_bev = rows[i].at("subscores").at("NC");
    if (rows[i].at("row") == "+obj") nc_obj = rows[i].at("subscores").at("NC");
  }
  Report("criterion 7 (cumulative streams non-decreasing; +obj raises NC)",
         rows.size() == 5 && worst_inc >= -0.002 && nc_obj > nc_bev,
         table + Fmt("min increment %.4f, NC %.4f -> %.4f", worst_inc, nc_bev,
                     nc_obj));

  // Trained planner for the anchor checks.
  CommandContext ctx;
  ctx.out = out;
  const TrainedPlanner tp = LoadTrained(ctx, out / "model.ckpt", ctx.config);
  const Planner planner = tp.MakePlanner();
  const std::vector<Scenario> held = LoadCorpus(out / "heldout", 50);
  const AnchorSet set =
      planner.Anchors(ExtractPerception(held.front()), InitMode::kHybrid);
  Report("criterion 8 (fused anchor set size)",
         set.size() == 20 && set.Count(AnchorSource::kDynamic) == 4 &&
             set.Count(AnchorSource::kStatic) == 16,
         Fmt("%.0f anchors: %.0f dynamic + %.0f static", double(set.size()),
             set.Count(AnchorSource::kDynamic),
             set.Count(AnchorSource::kStatic)));

  Cli(out, {"eval", "--expert"});
  const json expert = ReadJson(out / "reports" / "eval_expert.json");
  double worst_template = 1.0;
  std::string per;
  for (const auto& [name, v] : expert.at("per_template").items()) {
    const double e = v.at("EPDMS");
    worst_template = std::min(worst_template, e);
    per += name + Fmt("=%.3f ", e);
  }
  Report("criterion 10 (expert per-template EPDMS >= 0.9)",
         expert.at("per_template").size() == 6 && worst_template >= 0.9, per);

  const double ratio = trained.at("loss_ratio");
  Report("supplementary (training loss reduction >= 5x)", ratio >= 5.0,
         Fmt("loss %.4f -> %.4f (%.2fx)", trained.at("first_loss"),
             trained.at("final_loss"), ratio));

  int wins = 0, total = 0;
  double first_dyn = -1, first_static = -1;
  for (const Scenario& s : held) {
    if (s.kind != Template::kLeftTurn) continue;
    const AnchorSet a = planner.Anchors(ExtractPerception(s), InitMode::kHybrid);
    const FlatTrajectory expert_flat = Flatten(s.expert);
    double dyn = 1e18, stat = 1e18;
    for (size_t i = 0; i < a.size(); ++i) {
      const double d = Ade(a.anchors[i], expert_flat);
      (a.provenance[i] == AnchorSource::kDynamic ? dyn : stat) =
          std::min(a.provenance[i] == AnchorSource::kDynamic ? dyn : stat, d);
    }
    if (total == 0) {
      first_dyn = dyn;
      first_static = stat;
    }
    wins += dyn < stat;
    ++total;
  }
  Report("supplementary (left turn: best dynamic anchor beats best static)",
         total > 0 && first_dyn < first_static,
         Fmt("first scenario ADE %.3f vs %.3f; dynamic closer on %.0f/%.0f",
             first_dyn, first_static, wins, total));
}

}  // namespace
}  // namespace anchorplan

int main(int argc, char** argv) {
  using namespace anchorplan;
  namespace fs = std::filesystem;
  const auto start = std::chrono::steady_clock::now();
  std::unique_ptr<testing::TempDir> tmp;
  fs::path root;
  if (argc > 1) {
    root = argv[1];
    fs::create_directories(root);
  } else {
    tmp = std::make_unique<testing::TempDir>("acceptance");
    root = tmp->path();
  }
  try {
    ForwardStatistics();
    GradientFidelity();
    KMeansOracle();
    EpdmsExactness();
    FullPipeline(root / "full");
    Determinism(root);
  } catch (const std::exception& e) {
    std::cout << "acceptance aborted: " << e.what() << std::endl;
    return 1;
  }
  std::cout << "total " << Seconds(start) << " s, " << failures
            << " failure(s)" << std::endl;
  return failures == 0 ? 0 : 1;
}
