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

#include "anchorplan/trajectory.h"

#include <cmath>
#include <numbers>

namespace anchorplan {

double NormalizeAngle(double angle) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double a = std::remainder(angle, kTwoPi);  // [-pi, pi]
  if (a <= -std::numbers::pi) a += kTwoPi;
  return a;
}

Pose2D::Pose2D(double x_in, double y_in, double heading_in)
    : x(x_in), y(y_in), heading(NormalizeAngle(heading_in)) {}

FlatTrajectory Flatten(const Trajectory& t) {
  FlatTrajectory f(t.horizon());
  for (int i = 0; i < t.horizon(); ++i) {
    f.values[2 * i] = t.waypoints[i].x;
    f.values[2 * i + 1] = t.waypoints[i].y;
  }
  return f;
}

Trajectory Unflatten(const FlatTrajectory& f, double dt,
                     double initial_heading) {
  Trajectory t;
  t.dt = dt;
  t.waypoints.reserve(f.horizon());
  for (int i = 0; i < f.horizon(); ++i) {
    t.waypoints.push_back(Pose2D(f.x(i), f.y(i), 0.0));
  }
  return RecomputeHeadings(t, initial_heading);
}

Trajectory RecomputeHeadings(const Trajectory& t, double initial_heading) {
  Trajectory out = t;
  const int h = t.horizon();
  double prior = NormalizeAngle(initial_heading);
  for (int i = 0; i + 1 < h; ++i) {
    const double dx = t.waypoints[i + 1].x - t.waypoints[i].x;
    const double dy = t.waypoints[i + 1].y - t.waypoints[i].y;
    if (dx != 0.0 || dy != 0.0) prior = NormalizeAngle(std::atan2(dy, dx));
    out.waypoints[i].heading = prior;
  }
  if (h >= 1) out.waypoints[h - 1].heading = prior;
  return out;
}

double Ade(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() % 2 != 0) {
    throw HorizonMismatch("ade: horizon mismatch");
  }
  const size_t h = a.size() / 2;
  if (h == 0) return 0.0;
  double total = 0.0;
  for (size_t i = 0; i < h; ++i) {
    total += std::hypot(a[2 * i] - b[2 * i], a[2 * i + 1] - b[2 * i + 1]);
  }
  return total / static_cast<double>(h);
}

double Ade(const FlatTrajectory& a, const FlatTrajectory& b) {
  return Ade(std::span<const double>(a.values),
             std::span<const double>(b.values));
}

double Ade(const Trajectory& a, const Trajectory& b) {
  if (a.horizon() != b.horizon()) {
    throw HorizonMismatch("ade: horizon mismatch");
  }
  return Ade(Flatten(a), Flatten(b));
}

bool IsFinite(const Trajectory& t) {
  for (const Pose2D& p : t.waypoints) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) ||
        !std::isfinite(p.heading)) {
      return false;
    }
  }
  return std::isfinite(t.dt);
}

nlohmann::json ToJson(const Trajectory& t) {
  nlohmann::json wps = nlohmann::json::array();
  for (const Pose2D& p : t.waypoints) {
    wps.push_back({{"x", p.x}, {"y", p.y}, {"heading", p.heading}});
  }
  return {{"dt", t.dt}, {"waypoints", wps}};
}

Trajectory TrajectoryFromJson(const nlohmann::json& j) {
  Trajectory t;
  t.dt = j.at("dt").get<double>();
  for (const auto& w : j.at("waypoints")) {
    Pose2D p;
    p.x = w.at("x").get<double>();
    p.y = w.at("y").get<double>();
    p.heading = w.at("heading").get<double>();
    t.waypoints.push_back(p);
  }
  return t;
}

}  // namespace anchorplan
