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

#ifndef ANCHORPLAN_ADAM_H_
#define ANCHORPLAN_ADAM_H_

#include <span>
#include <vector>

#include "anchorplan/graph.h"

namespace anchorplan {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First and second moment estimates, one pair per parameter.
struct AdamState {
  std::vector<Tensor2> m;
  std::vector<Tensor2> v;
};

// One bias-corrected Adam update using each parameter's grad. `step` is
// 1-based. State is lazily sized on first use.
void AdamStep(std::span<Parameter* const> params, AdamState& state,
              const AdamConfig& cfg, int step);

class Adam {
 public:
  Adam(std::vector<Parameter*> params, AdamConfig cfg);

  void Step();
  void ZeroGrad();
  int step_count() const { return step_; }
  void set_lr(double lr) { cfg_.lr = lr; }

 private:
  std::vector<Parameter*> params_;
  AdamConfig cfg_;
  AdamState state_;
  int step_ = 0;
};

}  // namespace anchorplan

#endif  // ANCHORPLAN_ADAM_H_
