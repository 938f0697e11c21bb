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

#ifndef ANCHORPLAN_EXPERT_H_
#define ANCHORPLAN_EXPERT_H_

#include <stdexcept>

#include "anchorplan/scenario.h"

namespace anchorplan {

class InfeasibleScenario : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Pure-pursuit lateral control plus an intelligent-driver longitudinal rule.
struct ExpertConfig {
  int horizon = kDefaultHorizon;
  double dt = kDefaultDt;
  int substeps = 10;
  double max_accel = 1.5;
  double comfort_decel = 2.0;
  double max_decel = 4.0;
  double time_headway = 1.2;
  double standstill_gap = 2.0;
  double stop_line_gap = 1.0;
  double max_lateral_accel = 2.5;
  double min_lookahead = 4.0;
  double lookahead_time = 0.8;
  // Obstacles whose center is within this lateral distance of the route are
  // treated as leaders.
  double leader_lateral_band = 2.2;
};

// Deterministic ego-frame plan for `s` (s.expert is ignored). Throws
// InfeasibleScenario when a red stop line cannot be honored.
Trajectory ExpertPlan(const Scenario& s, const ExpertConfig& cfg = {});

}  // namespace anchorplan

#endif  // ANCHORPLAN_EXPERT_H_
