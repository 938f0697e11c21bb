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


#include <algorithm>
#include <cmath>

#include "anchorplan/epdms.h"

namespace anchorplan {

namespace {

double Binary(bool ok) { return ok ? 1.0 : 0.0; }

void CheckHorizon(const Trajectory& t, const Scenario& s) {
  if (t.horizon() != s.expert.horizon()) {
    throw HorizonMismatch("sub-score: trajectory horizon " +
                          std::to_string(t.horizon()) + " vs scenario " +
                          std::to_string(s.expert.horizon()));
  }
}

Vec2 Position(const Pose2D& p) { return {p.x, p.y}; }

double DrivingDirection(const Trajectory& world, const Scenario& s) {
  double sum = 0.0;
  for (const Pose2D& p : world.waypoints) {
    const LaneAssociation a = AssociateLane(Position(p), s);
    const Vec2 dir{std::cos(p.heading), std::sin(p.heading)};
    sum += dir.Dot(a.projection.tangent);
  }
  return Binary(world.horizon() == 0 || sum / world.horizon() >= 0.0);
}

double LaneKeeping(const Trajectory& world, const Scenario& s,
                   const EpdmsConfig& cfg) {
  double worst = 0.0;
  for (const Pose2D& p : world.waypoints) {
    worst = std::max(worst, std::abs(AssociateLane(Position(p), s).projection.lateral));
  }
  return Binary(worst <= cfg.max_lateral_offset);
}

// Constant-velocity extrapolation of ego and obstacles from every waypoint
// (and the start) over (0, threshold].
double TimeToCollision(const Trajectory& t, const Scenario& s,
                       const EpdmsConfig& cfg) {
  const Trajectory world = ToWorldFrame(t, s.ego_start);
  const auto vel = VelocitySamples(t, s.ego_speed);
  const int n_tau = static_cast<int>(std::round(cfg.ttc_threshold / cfg.ttc_step));
  for (int i = 0; i <= world.horizon(); ++i) {
    const Pose2D pose = i == 0 ? s.ego_start : world.waypoints[i - 1];
    // Ego-frame velocity rotated into the world frame.
    const Vec2 v_local = vel[i].second;
    const Vec2 v = ToWorld(v_local, {0.0, 0.0}, s.ego_start.heading);
    const double time = i * t.dt;
    for (int k = 1; k <= n_tau; ++k) {
      const double tau = std::min(k * cfg.ttc_step, cfg.ttc_threshold);
      const OrientedBox ego = EgoBox(
          Pose2D(pose.x + v.x * tau, pose.y + v.y * tau, pose.heading));
      for (const Obstacle& obs : s.obstacles) {
        if (BoxesOverlap(ego, obs.BoxAt(time + tau))) return 0.0;
      }
    }
  }
  return 1.0;
}

}  // namespace

std::vector<std::pair<double, Vec2>> VelocitySamples(const Trajectory& t,
                                                     double start_speed) {
  std::vector<std::pair<double, Vec2>> out;
  out.emplace_back(0.0, Vec2{start_speed, 0.0});
  Vec2 prev{0.0, 0.0};
  for (int i = 0; i < t.horizon(); ++i) {
    const Vec2 cur = Position(t.waypoints[i]);
    out.emplace_back((i + 0.5) * t.dt, (cur - prev) * (1.0 / t.dt));
    prev = cur;
  }
  return out;
}

std::vector<std::pair<double, Vec2>> Accelerations(const Trajectory& t,
                                                   double start_speed) {
  const auto vel = VelocitySamples(t, start_speed);
  std::vector<std::pair<double, Vec2>> out;
  for (size_t i = 1; i < vel.size(); ++i) {
    const double gap = vel[i].first - vel[i - 1].first;
    out.emplace_back(0.5 * (vel[i].first + vel[i - 1].first),
                     (vel[i].second - vel[i - 1].second) * (1.0 / gap));
  }
  return out;
}

std::vector<double> JerkMagnitudes(const Trajectory& t) {
  auto vel = VelocitySamples(t, 0.0);
  vel.erase(vel.begin());
  std::vector<std::pair<double, Vec2>> acc;
  for (size_t i = 1; i < vel.size(); ++i) {
    acc.emplace_back(0.5 * (vel[i].first + vel[i - 1].first),
                     (vel[i].second - vel[i - 1].second) * (1.0 / t.dt));
  }
  std::vector<double> out;
  for (size_t i = 1; i < acc.size(); ++i) {
    out.push_back(
        ((acc[i].second - acc[i - 1].second) * (1.0 / t.dt)).Norm());
  }
  return out;
}

double RouteProgress(const Trajectory& t, const Scenario& s) {
  if (t.horizon() == 0) return 0.0;
  const std::vector<Vec2> path = RoutePath(s);
  const Trajectory world = ToWorldFrame(t, s.ego_start);
  const double start =
      ProjectOntoPolyline(Position(s.ego_start), path).arclength;
  const double end =
      ProjectOntoPolyline(Position(world.waypoints.back()), path).arclength;
  return end - start;
}

bool CrossesRedLight(const Trajectory& t, const Scenario& s) {
  if (!s.traffic_light || s.traffic_light->state != LightState::kRed) {
    return false;
  }
  const TrafficLightState& light = *s.traffic_light;
  const Trajectory world = ToWorldFrame(t, s.ego_start);
  Vec2 prev = Position(s.ego_start);
  for (const Pose2D& p : world.waypoints) {
    const Vec2 cur = Position(p);
    if (SegmentsIntersect(prev, cur, light.stop_line_a, light.stop_line_b)) {
      return true;
    }
    prev = cur;
  }
  return false;
}

double SubScore(SubScoreId id, const Trajectory& t, const Scenario& s,
                const EpdmsConfig& cfg) {
  CheckHorizon(t, s);
  switch (id) {
    case SubScoreId::kNC:
      return Binary(!Collides(t, s).has_value());
    case SubScoreId::kDAC:
      return Binary(InsideDrivable(t, s) == 1.0);
    case SubScoreId::kDDC:
      return DrivingDirection(ToWorldFrame(t, s.ego_start), s);
    case SubScoreId::kTLC:
      return Binary(!CrossesRedLight(t, s));
    case SubScoreId::kTTC:
      return TimeToCollision(t, s, cfg);
    case SubScoreId::kEP: {
      const double expert = RouteProgress(s.expert, s);
      if (expert < cfg.min_expert_progress) return 1.0;
      return std::clamp(RouteProgress(t, s) / expert, 0.0, 1.0);
    }
    case SubScoreId::kHC: {
      double worst = 0.0;
      for (const auto& [time, a] : Accelerations(t, s.ego_speed)) {
        worst = std::max(worst, a.Norm());
      }
      return Binary(worst <= cfg.max_accel);
    }
    case SubScoreId::kLK:
      return LaneKeeping(ToWorldFrame(t, s.ego_start), s, cfg);
    case SubScoreId::kEC: {
      double worst = 0.0;
      for (double j : JerkMagnitudes(t)) worst = std::max(worst, j);
      return Binary(worst <= cfg.max_jerk);
    }
  }
  throw std::invalid_argument("unknown sub-score");
}

ScoreVector AllSubScores(const Trajectory& t, const Scenario& s,
                         const EpdmsConfig& cfg) {
  ScoreVector out{};
  for (int i = 0; i < kNumSubScores; ++i) {
    out[i] = SubScore(SubScoreId(i), t, s, cfg);
  }
  return out;
}

}  // namespace anchorplan
