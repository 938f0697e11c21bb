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

#include "anchorplan/expert.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace anchorplan {

namespace {

struct PathProfile {
  std::vector<Vec2> points;
  std::vector<double> stations;
  std::vector<double> curvature;  // unsigned, per vertex
};

PathProfile BuildProfile(std::vector<Vec2> points) {
  PathProfile p;
  p.points = std::move(points);
  const size_t n = p.points.size();
  p.stations.assign(n, 0.0);
  p.curvature.assign(n, 0.0);
  for (size_t i = 1; i < n; ++i) {
    p.stations[i] = p.stations[i - 1] + (p.points[i] - p.points[i - 1]).Norm();
  }
  for (size_t i = 1; i + 1 < n; ++i) {
    const Vec2 a = p.points[i] - p.points[i - 1];
    const Vec2 b = p.points[i + 1] - p.points[i];
    const double turn = std::atan2(a.Cross(b), a.Dot(b));
    const double span = 0.5 * (a.Norm() + b.Norm());
    if (span > 0.0) p.curvature[i] = std::abs(turn) / span;
  }
  return p;
}

double CurveSpeedLimit(const PathProfile& p, double from, double to,
                       double max_lateral_accel) {
  double limit = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < p.points.size(); ++i) {
    if (p.stations[i] < from || p.stations[i] > to) continue;
    if (p.curvature[i] > 1e-6) {
      limit = std::min(limit, std::sqrt(max_lateral_accel / p.curvature[i]));
    }
  }
  return limit;
}

struct Leader {
  double gap = std::numeric_limits<double>::infinity();
  double speed = 0.0;
  double standstill = 0.0;
};

}  // namespace

Trajectory ExpertPlan(const Scenario& s, const ExpertConfig& cfg) {
  const PathProfile path = BuildProfile(RoutePath(s));
  const double h = cfg.dt / cfg.substeps;
  Vec2 pos{s.ego_start.x, s.ego_start.y};
  double heading = s.ego_start.heading;
  double v = s.ego_speed;

  std::optional<double> stop_station;
  if (s.traffic_light && s.traffic_light->state == LightState::kRed) {
    const Vec2 mid =
        (s.traffic_light->stop_line_a + s.traffic_light->stop_line_b) * 0.5;
    stop_station = ProjectOntoPolyline(mid, path.points).arclength;
  }

  Trajectory out;
  out.dt = cfg.dt;
  const Vec2 origin{s.ego_start.x, s.ego_start.y};
  double time = 0.0;
  for (int step = 0; step < cfg.horizon * cfg.substeps; ++step) {
    const PolylineProjection proj = ProjectOntoPolyline(pos, path.points);
    const double station = proj.arclength;

    // Lateral: pure pursuit on a speed-scaled lookahead point.
    const double lookahead =
        std::max(cfg.min_lookahead, cfg.lookahead_time * v);
    const Vec2 target = PolylinePointAt(path.points, station + lookahead);
    const Vec2 local = ToLocal(target, pos, heading);
    const double dist = local.Norm();
    const double curvature = dist > 1e-9 ? 2.0 * local.y / (dist * dist) : 0.0;

    // Longitudinal: free-road term toward the desired speed.
    const double window = std::max(10.0, 3.0 * v);
    const double desired =
        std::min(s.speed_limit, CurveSpeedLimit(path, station, station + window,
                                                cfg.max_lateral_accel));
    double accel;
    if (v <= desired) {
      accel = cfg.max_accel * (1.0 - std::pow(v / desired, 4.0));
    } else {
      accel = -cfg.comfort_decel *
              (1.0 - std::pow(desired / v, cfg.max_accel * 4.0 /
                                                cfg.comfort_decel));
    }

    // Interaction with the closest leader (obstacle or red stop line).
    Leader leader;
    for (const Obstacle& obs : s.obstacles) {
      const OrientedBox box = obs.BoxAt(time);
      const PolylineProjection op = ProjectOntoPolyline(box.center, path.points);
      if (op.distance > cfg.leader_lateral_band) continue;
      if (op.arclength <= station) continue;
      const double gap =
          op.arclength - station - 0.5 * (kEgoLength + obs.length);
      if (gap < leader.gap) {
        leader.gap = gap;
        leader.speed = std::max(0.0, obs.velocity.Dot(op.tangent));
        leader.standstill = cfg.standstill_gap;
      }
    }
    if (stop_station.has_value()) {
      const double gap = *stop_station - station - 0.5 * kEgoLength;
      if (gap < leader.gap) {
        leader.gap = gap;
        leader.speed = 0.0;
        leader.standstill = cfg.stop_line_gap;
      }
    }
    if (std::isfinite(leader.gap)) {
      if (leader.gap <= 0.05) {
        accel = -cfg.max_decel;
      } else {
        const double desired_gap =
            leader.standstill +
            std::max(0.0, v * cfg.time_headway +
                              v * (v - leader.speed) /
                                  (2.0 * std::sqrt(cfg.max_accel *
                                                   cfg.comfort_decel)));
        accel -= cfg.max_accel * std::pow(desired_gap / leader.gap, 2.0);
      }
    }
    accel = std::clamp(accel, -cfg.max_decel, cfg.max_accel);

    v = std::max(0.0, v + accel * h);
    pos = pos + Vec2{std::cos(heading), std::sin(heading)} * (v * h);
    heading = NormalizeAngle(heading + v * curvature * h);
    time += h;

    if ((step + 1) % cfg.substeps == 0) {
      const Vec2 ego = ToLocal(pos, origin, s.ego_start.heading);
      out.waypoints.push_back(
          Pose2D(ego.x, ego.y, heading - s.ego_start.heading));
    }
  }

  if (stop_station.has_value()) {
    const Vec2 last =
        ToWorld({out.waypoints.back().x, out.waypoints.back().y}, origin,
                s.ego_start.heading);
    const double last_station = ProjectOntoPolyline(last, path.points).arclength;
    if (last_station >= *stop_station - 0.5 * kEgoLength) {
      throw InfeasibleScenario("expert cannot stop before the red stop line");
    }
  }
  return out;
}

}  // namespace anchorplan
