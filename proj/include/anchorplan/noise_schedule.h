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


#ifndef ANCHORPLAN_NOISE_SCHEDULE_H_
#define ANCHORPLAN_NOISE_SCHEDULE_H_

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "anchorplan/trajectory.h"

namespace anchorplan {

class ScheduleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Cumulative signal-retention table alpha_bar[t], t in [0, T], alpha_bar[0]
// = 1, strictly decreasing.
class NoiseSchedule {
 public:
  // kind: "cosine" (offset s = 0.008) or "linear" (betas scaled to T).
  // Per-step betas are clipped to 0.999 so alpha_bar[T] stays positive.
  explicit NoiseSchedule(int total_steps = 100,
                         const std::string& kind = "cosine");

  int T() const { return static_cast<int>(alpha_bar_.size()) - 1; }
  const std::string& kind() const { return kind_; }
  // Throws ScheduleError when t is outside [0, T].
  double AlphaBar(int t) const;
  const std::vector<double>& table() const { return alpha_bar_; }

 private:
  std::string kind_;
  std::vector<double> alpha_bar_;
};

// sqrt(ab_t) * x0 + sqrt(1 - ab_t) * eps, elementwise.
std::vector<double> ForwardNoise(std::span<const double> x0, int t,
                                 std::span<const double> eps,
                                 const NoiseSchedule& schedule);
FlatTrajectory ForwardNoise(const FlatTrajectory& x0, int t,
                            std::span<const double> eps,
                            const NoiseSchedule& schedule);

// Clean-signal estimate from a noisy state and predicted noise.
std::vector<double> PredictX0(std::span<const double> x_t, int t,
                              std::span<const double> eps_hat,
                              const NoiseSchedule& schedule);

// Deterministic (variance-free) step from level t to level t_next < t.
std::vector<double> ReverseStep(std::span<const double> x_t, int t,
                                int t_next, std::span<const double> eps_hat,
                                const NoiseSchedule& schedule);

// Evenly spaced levels from `start` down to 0: round(start * (1 - k/steps))
// for k = 0..steps, duplicates removed. steps = 0 gives {start}.
std::vector<int> ReverseTimesteps(int start, int steps);

}  // namespace anchorplan

#endif  // ANCHORPLAN_NOISE_SCHEDULE_H_
