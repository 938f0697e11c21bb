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


#ifndef ANCHORPLAN_EVALUATION_H_
#define ANCHORPLAN_EVALUATION_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "anchorplan/epdms.h"
#include "anchorplan/perception.h"
#include "anchorplan/planner.h"
#include "anchorplan/scenario.h"

namespace anchorplan {

struct EvalOptions {
  InitMode mode = InitMode::kHybrid;
  int steps = 2;
  uint64_t seed = 0;
  // Score each scenario's expert instead of running the planner.
  bool expert_bypass = false;
  bool keep_plans = false;
};

struct EvalResult {
  std::vector<EpdmsReport> reports;
  std::vector<double> ade;  // selected vs expert; 0 under expert bypass
  std::vector<PlanResult> plans;  // filled when keep_plans
  CorpusSummary summary;
  double mean_ade = 0.0;
};

// Sampling seed of one scenario, independent of its position in the corpus.
uint64_t ScenarioPlanSeed(uint64_t seed, const std::string& scenario_id);

// `planner` may be null under expert bypass. The parallel version spreads
// scenarios across threads and is bit-identical to the serial reference.
EvalResult EvaluateCorpusSerial(const Planner* planner,
                                const std::vector<Scenario>& scenarios,
                                const EvalOptions& opts,
                                const EpdmsConfig& metrics,
                                const PerceptionConfig& perception = {});
EvalResult EvaluateCorpusParallel(const Planner* planner,
                                  const std::vector<Scenario>& scenarios,
                                  const EvalOptions& opts,
                                  const EpdmsConfig& metrics,
                                  const PerceptionConfig& perception = {});

// Per-scenario rows then a "mean" summary row.
std::string ReportCsv(const EvalResult& r);

// Corpus summaries keyed by template.
std::map<Template, CorpusSummary> PerTemplate(
    const std::vector<Scenario>& scenarios, const EvalResult& r);

}  // namespace anchorplan

#endif  // ANCHORPLAN_EVALUATION_H_
