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


#include "anchorplan/noise_schedule.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace anchorplan {

namespace {

constexpr double kCosineOffset = 0.008;
constexpr double kMaxBeta = 0.999;

void CheckSizes(size_t a, size_t b) {
  if (a != b) {
    throw ScheduleError("noise: dimension mismatch (" + std::to_string(a) +
                        " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

NoiseSchedule::NoiseSchedule(int total_steps, const std::string& kind)
    : kind_(kind) {
  if (total_steps < 1) throw ScheduleError("schedule: T must be >= 1");
  std::vector<double> betas(total_steps + 1, 0.0);
  if (kind == "cosine") {
    auto f = [&](int t) {
      const double u = (double(t) / total_steps + kCosineOffset) /
                       (1.0 + kCosineOffset) * std::numbers::pi / 2.0;
      return std::cos(u) * std::cos(u);
    };
    for (int t = 1; t <= total_steps; ++t) {
      betas[t] = std::min(1.0 - f(t) / f(t - 1), kMaxBeta);
    }
  } else if (kind == "linear") {
    const double scale = 1000.0 / total_steps;
    const double lo = 1e-4 * scale;
    const double hi = std::min(0.02 * scale, kMaxBeta);
    for (int t = 1; t <= total_steps; ++t) {
      const double frac =
          total_steps == 1 ? 1.0 : double(t - 1) / (total_steps - 1);
      betas[t] = lo + (hi - lo) * frac;
    }
  } else {
    throw ScheduleError("schedule: unknown kind '" + kind + "'");
  }
  alpha_bar_.assign(total_steps + 1, 1.0);
  for (int t = 1; t <= total_steps; ++t) {
    alpha_bar_[t] = alpha_bar_[t - 1] * (1.0 - betas[t]);
  }
}

double NoiseSchedule::AlphaBar(int t) const {
  if (t < 0 || t > T()) {
    throw ScheduleError("schedule: t=" + std::to_string(t) +
                        " outside [0, " + std::to_string(T()) + "]");
  }
  return alpha_bar_[t];
}

std::vector<double> ForwardNoise(std::span<const double> x0, int t,
                                 std::span<const double> eps,
                                 const NoiseSchedule& schedule) {
  CheckSizes(x0.size(), eps.size());
  const double ab = schedule.AlphaBar(t);
  const double a = std::sqrt(ab);
  const double s = std::sqrt(1.0 - ab);
  std::vector<double> out(x0.size());
  for (size_t i = 0; i < x0.size(); ++i) out[i] = a * x0[i] + s * eps[i];
  return out;
}

FlatTrajectory ForwardNoise(const FlatTrajectory& x0, int t,
                            std::span<const double> eps,
                            const NoiseSchedule& schedule) {
  return FlatTrajectory(ForwardNoise(x0.values, t, eps, schedule));
}

std::vector<double> PredictX0(std::span<const double> x_t, int t,
                              std::span<const double> eps_hat,
                              const NoiseSchedule& schedule) {
  CheckSizes(x_t.size(), eps_hat.size());
  const double ab = schedule.AlphaBar(t);
  const double a = std::sqrt(ab);
  const double s = std::sqrt(1.0 - ab);
  std::vector<double> out(x_t.size());
  for (size_t i = 0; i < x_t.size(); ++i) {
    out[i] = (x_t[i] - s * eps_hat[i]) / a;
  }
  return out;
}

std::vector<double> ReverseStep(std::span<const double> x_t, int t,
                                int t_next, std::span<const double> eps_hat,
                                const NoiseSchedule& schedule) {
  if (t_next >= t) throw ScheduleError("reverse step must lower t");
  const std::vector<double> x0 = PredictX0(x_t, t, eps_hat, schedule);
  if (t_next == 0) return x0;
  return ForwardNoise(x0, t_next, eps_hat, schedule);
}

std::vector<int> ReverseTimesteps(int start, int steps) {
  std::vector<int> ts;
  if (steps <= 0) return {start};
  for (int k = 0; k <= steps; ++k) {
    const int t = static_cast<int>(
        std::lround(start * (1.0 - double(k) / steps)));
    if (ts.empty() || t != ts.back()) ts.push_back(t);
  }
  return ts;
}

}  // namespace anchorplan
