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

#ifndef ANCHORPLAN_SCENARIO_GEN_H_
#define ANCHORPLAN_SCENARIO_GEN_H_

#include <cstdint>
#include <vector>

#include "anchorplan/expert.h"
#include "anchorplan/scenario.h"

namespace anchorplan {

inline constexpr int kMaxGenerationAttempts = 64;

// Samples template parameters until the expert plan is valid, up to
// kMaxGenerationAttempts; throws InfeasibleScenario after that.
Scenario GenerateScenario(uint64_t seed, Template kind,
                          const ExpertConfig& expert = {});

// Per-scenario seed for the index-th scenario of `kind` under `base_seed`.
uint64_t ScenarioSeed(uint64_t base_seed, Template kind, int index);

// count scenarios per template, template-major order. Generation runs in
// parallel over scenarios; output order and content do not depend on the
// thread count.
std::vector<Scenario> GenerateBatch(uint64_t base_seed, int count_per_template,
                                    const ExpertConfig& expert = {});

// Straight two-lane road (ego lane y=0, left lane y=3.5) and a four-arm
// intersection. Exposed for tests that build hand-made worlds.
void BuildStraightRoad(Scenario& s, double x_end = 150.0);
void BuildIntersection(Scenario& s, double entry_x, double radius);

// Minimum bumper gap to each same-lane obstacle over the expert horizon.
double MinLeaderGap(const Scenario& s);

}  // namespace anchorplan

#endif  // ANCHORPLAN_SCENARIO_GEN_H_
