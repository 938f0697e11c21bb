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


#include "anchorplan/evaluation.h"

#include <exception>

#include "anchorplan/hash.h"
#include "anchorplan/rng.h"

namespace anchorplan {

namespace {

void EvaluateOne(const Planner* planner, const Scenario& s,
                 const EvalOptions& opts, const EpdmsConfig& metrics,
                 const PerceptionConfig& perception, EpdmsReport& report,
                 double& ade, PlanResult* plan) {
  if (opts.expert_bypass) {
    report = Evaluate(s.expert, s, metrics);
    ade = 0.0;
    return;
  }
  if (planner == nullptr) throw std::invalid_argument("eval: no planner");
  PlanResult result =
      planner->Plan(ExtractPerception(s, perception), opts.mode, opts.steps,
                    ScenarioPlanSeed(opts.seed, s.id));
  if (!IsFinite(result.trajectory)) {
    throw NumericError("non-finite plan for scenario " + s.id);
  }
  report = Evaluate(result.trajectory, s, metrics);
  ade = Ade(result.trajectory, s.expert);
  if (plan != nullptr) *plan = std::move(result);
}

EvalResult Prepare(size_t n, const EvalOptions& opts) {
  EvalResult r;
  r.reports.resize(n);
  r.ade.resize(n);
  if (opts.keep_plans) r.plans.resize(n);
  return r;
}

void Finish(EvalResult& r) {
  if (r.reports.empty()) return;
  r.summary = CorpusEpdms(r.reports);
  double sum = 0.0;
  for (double a : r.ade) sum += a;
  r.mean_ade = sum / r.ade.size();
}

}  // namespace

uint64_t ScenarioPlanSeed(uint64_t seed, const std::string& scenario_id) {
  return MixSeed(seed, Fnv1a64(scenario_id));
}

EvalResult EvaluateCorpusSerial(const Planner* planner,
                                const std::vector<Scenario>& scenarios,
                                const EvalOptions& opts,
                                const EpdmsConfig& metrics,
                                const PerceptionConfig& perception) {
  EvalResult r = Prepare(scenarios.size(), opts);
  for (size_t i = 0; i < scenarios.size(); ++i) {
    EvaluateOne(planner, scenarios[i], opts, metrics, perception,
                r.reports[i], r.ade[i],
                opts.keep_plans ? &r.plans[i] : nullptr);
  }
  Finish(r);
  return r;
}

EvalResult EvaluateCorpusParallel(const Planner* planner,
                                  const std::vector<Scenario>& scenarios,
                                  const EvalOptions& opts,
                                  const EpdmsConfig& metrics,
                                  const PerceptionConfig& perception) {
  EvalResult r = Prepare(scenarios.size(), opts);
  const long n = static_cast<long>(scenarios.size());
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      EvaluateOne(planner, scenarios[i], opts, metrics, perception,
                  r.reports[i], r.ade[i],
                  opts.keep_plans ? &r.plans[i] : nullptr);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  Finish(r);
  return r;
}

std::string ReportCsv(const EvalResult& r) {
  std::string out = CsvHeader() + "\n";
  for (const EpdmsReport& rep : r.reports) out += CsvRow(rep) + "\n";
  if (!r.reports.empty()) out += CsvSummaryRow("mean", r.summary) + "\n";
  return out;
}

std::map<Template, CorpusSummary> PerTemplate(
    const std::vector<Scenario>& scenarios, const EvalResult& r) {
  std::map<Template, std::vector<EpdmsReport>> groups;
  for (size_t i = 0; i < scenarios.size(); ++i) {
    groups[scenarios[i].kind].push_back(r.reports[i]);
  }
  std::map<Template, CorpusSummary> out;
  for (const auto& [kind, reports] : groups) out[kind] = CorpusEpdms(reports);
  return out;
}

}  // namespace anchorplan
