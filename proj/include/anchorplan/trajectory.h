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

#ifndef ANCHORPLAN_TRAJECTORY_H_
#define ANCHORPLAN_TRAJECTORY_H_

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace anchorplan {

inline constexpr int kDefaultHorizon = 8;
inline constexpr double kDefaultDt = 0.5;

// Raised when two trajectories (or a trajectory and a scenario) disagree on
// horizon length.
class HorizonMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Maps any finite angle into (-pi, pi].
double NormalizeAngle(double angle);

struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;

  Pose2D() = default;
  Pose2D(double x_in, double y_in, double heading_in);

  friend bool operator==(const Pose2D&, const Pose2D&) = default;
};

// Fixed-horizon ego plan. Waypoint i is the pose at time (i + 1) * dt; the
// start pose at time 0 is not stored.
struct Trajectory {
  std::vector<Pose2D> waypoints;
  double dt = kDefaultDt;

  int horizon() const { return static_cast<int>(waypoints.size()); }
  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

// (x1, y1, ..., xH, yH). The vector space the diffusion process runs in.
struct FlatTrajectory {
  std::vector<double> values;

  FlatTrajectory() = default;
  explicit FlatTrajectory(std::vector<double> v) : values(std::move(v)) {}
  explicit FlatTrajectory(int horizon) : values(2 * horizon, 0.0) {}

  int horizon() const { return static_cast<int>(values.size() / 2); }
  double x(int i) const { return values[2 * i]; }
  double y(int i) const { return values[2 * i + 1]; }
  friend bool operator==(const FlatTrajectory&, const FlatTrajectory&) =
      default;
};

FlatTrajectory Flatten(const Trajectory& t);

// Headings are rebuilt from waypoint differences, starting from
// `initial_heading` for degenerate leading segments.
Trajectory Unflatten(const FlatTrajectory& f, double dt = kDefaultDt,
                     double initial_heading = 0.0);

// heading_i = atan2 of the segment leaving waypoint i; the last waypoint
// copies its predecessor; zero-length segments inherit the prior heading.
Trajectory RecomputeHeadings(const Trajectory& t, double initial_heading);

// Mean Euclidean distance over corresponding waypoints.
double Ade(const Trajectory& a, const Trajectory& b);
double Ade(const FlatTrajectory& a, const FlatTrajectory& b);
double Ade(std::span<const double> a, std::span<const double> b);

bool IsFinite(const Trajectory& t);

nlohmann::json ToJson(const Trajectory& t);
Trajectory TrajectoryFromJson(const nlohmann::json& j);

}  // namespace anchorplan

#endif  // ANCHORPLAN_TRAJECTORY_H_
