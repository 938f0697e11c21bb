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

#include "anchorplan/scenario.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace anchorplan {

namespace {

constexpr std::array<std::string_view, 6> kTemplateNames = {
    "StraightCruise", "LeadVehicle", "LeftTurn",
    "RightTurn",      "RedLight",    "LaneBlockedSwerve"};
constexpr std::array<std::string_view, 4> kCommandNames = {
    "TurnLeft", "TurnRight", "GoStraight", "Stop"};

}  // namespace

std::string_view TemplateName(Template t) {
  return kTemplateNames[static_cast<int>(t)];
}

Template TemplateFromName(std::string_view name) {
  for (size_t i = 0; i < kTemplateNames.size(); ++i) {
    if (kTemplateNames[i] == name) return static_cast<Template>(i);
  }
  throw std::invalid_argument("unknown template: " + std::string(name));
}

std::string_view CommandName(Command c) {
  return kCommandNames[static_cast<int>(c)];
}

Command CommandFromName(std::string_view name) {
  for (size_t i = 0; i < kCommandNames.size(); ++i) {
    if (kCommandNames[i] == name) return static_cast<Command>(i);
  }
  throw std::invalid_argument("unknown command: " + std::string(name));
}

LaneElement MakeLane(int id, std::vector<Vec2> centerline, double width,
                     std::vector<int> successors) {
  LaneElement lane;
  lane.id = id;
  lane.width = width;
  lane.left_boundary = OffsetPolyline(centerline, 0.5 * width);
  lane.right_boundary = OffsetPolyline(centerline, -0.5 * width);
  lane.centerline = std::move(centerline);
  lane.successors = std::move(successors);
  return lane;
}

OrientedBox Obstacle::BoxAt(double time) const {
  return {center + velocity * time, length, width, heading};
}

const LaneElement& Scenario::Lane(int lane_id) const {
  for (const LaneElement& lane : lanes) {
    if (lane.id == lane_id) return lane;
  }
  throw std::out_of_range("no lane with id " + std::to_string(lane_id));
}

Trajectory ToWorldFrame(const Trajectory& t, const Pose2D& ego_start) {
  Trajectory out = t;
  const Vec2 origin{ego_start.x, ego_start.y};
  for (Pose2D& p : out.waypoints) {
    const Vec2 w = ToWorld({p.x, p.y}, origin, ego_start.heading);
    p = Pose2D(w.x, w.y, p.heading + ego_start.heading);
  }
  return out;
}

std::vector<Vec2> RoutePath(const Scenario& s) {
  std::vector<Vec2> path;
  if (s.lane_change.has_value()) {
    // Route is {from, to} with `to` parallel to `from`.
    const LaneElement& from = s.Lane(s.route.at(0));
    const LaneElement& to = s.Lane(s.route.at(1));
    const double shift =
        ProjectOntoPolyline(to.centerline.front(), from.centerline).lateral;
    const double len = PolylineLength(from.centerline);
    const int count = static_cast<int>(std::ceil(len / 0.5)) + 1;
    const std::vector<Vec2> base = ResamplePolyline(from.centerline, count);
    const LaneChange& lc = *s.lane_change;
    for (int i = 0; i < count; ++i) {
      const double station = len * i / (count - 1);
      const double u =
          std::clamp((station - lc.start_station) / lc.length, 0.0, 1.0);
      const double blend = 0.5 * (1.0 - std::cos(std::numbers::pi * u));
      const Vec2 tangent = PolylineTangentAt(from.centerline, station);
      const Vec2 normal{-tangent.y, tangent.x};
      path.push_back(base[i] + normal * (shift * blend));
    }
    return path;
  }
  for (int lane_id : s.route) {
    const LaneElement& lane = s.Lane(lane_id);
    for (const Vec2& p : lane.centerline) {
      if (!path.empty() && (p - path.back()).Norm() < 1e-9) continue;
      path.push_back(p);
    }
  }
  return path;
}

OrientedBox EgoBox(const Pose2D& world_pose) {
  return {{world_pose.x, world_pose.y}, kEgoLength, kEgoWidth,
          world_pose.heading};
}

std::optional<int> Collides(const Trajectory& t, const Scenario& s) {
  const Trajectory world = ToWorldFrame(t, s.ego_start);
  for (int i = 0; i < world.horizon(); ++i) {
    const OrientedBox ego = EgoBox(world.waypoints[i]);
    const double time = (i + 1) * t.dt;
    for (const Obstacle& obs : s.obstacles) {
      if (BoxesOverlap(ego, obs.BoxAt(time))) return i;
    }
  }
  return std::nullopt;
}

double InsideDrivable(const Trajectory& t, const Scenario& s) {
  if (t.horizon() == 0) return 1.0;
  const Trajectory world = ToWorldFrame(t, s.ego_start);
  int inside = 0;
  for (const Pose2D& p : world.waypoints) {
    bool all = true;
    for (const Vec2& c : EgoBox(p).Corners()) {
      if (!PointInPolygon(c, s.drivable_area)) {
        all = false;
        break;
      }
    }
    inside += all ? 1 : 0;
  }
  return static_cast<double>(inside) / t.horizon();
}

LaneAssociation AssociateLane(Vec2 world_point, const Scenario& s) {
  LaneAssociation best;
  best.projection.distance = std::numeric_limits<double>::infinity();
  for (const LaneElement& lane : s.lanes) {
    const PolylineProjection p =
        ProjectOntoPolyline(world_point, lane.centerline);
    if (p.distance < best.projection.distance) {
      best.lane_id = lane.id;
      best.projection = p;
    }
  }
  return best;
}

bool ExpertIsValid(const Scenario& s) {
  return IsFinite(s.expert) && InsideDrivable(s.expert, s) == 1.0 &&
         !Collides(s.expert, s).has_value();
}

Scenario Translated(const Scenario& s, double dx, double dy) {
  const Vec2 d{dx, dy};
  Scenario out = s;
  auto shift = [&](std::vector<Vec2>& pts) {
    for (Vec2& p : pts) p = p + d;
  };
  for (LaneElement& lane : out.lanes) {
    shift(lane.centerline);
    shift(lane.left_boundary);
    shift(lane.right_boundary);
  }
  shift(out.drivable_area);
  for (Obstacle& o : out.obstacles) o.center = o.center + d;
  if (out.traffic_light) {
    out.traffic_light->stop_line_a = out.traffic_light->stop_line_a + d;
    out.traffic_light->stop_line_b = out.traffic_light->stop_line_b + d;
  }
  out.ego_start.x += dx;
  out.ego_start.y += dy;
  return out;
}

}  // namespace anchorplan
