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

#ifndef ANCHORPLAN_SCENARIO_H_
#define ANCHORPLAN_SCENARIO_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "anchorplan/geometry.h"
#include "anchorplan/trajectory.h"
#include "json.hpp"

namespace anchorplan {

inline constexpr double kEgoLength = 4.6;
inline constexpr double kEgoWidth = 1.9;
inline constexpr double kLaneWidth = 3.5;

enum class Template {
  kStraightCruise,
  kLeadVehicle,
  kLeftTurn,
  kRightTurn,
  kRedLight,
  kLaneBlockedSwerve,
};
inline constexpr std::array<Template, 6> kAllTemplates = {
    Template::kStraightCruise, Template::kLeadVehicle, Template::kLeftTurn,
    Template::kRightTurn,      Template::kRedLight,
    Template::kLaneBlockedSwerve};

std::string_view TemplateName(Template t);
Template TemplateFromName(std::string_view name);

// One-hot order is the enum order.
enum class Command { kTurnLeft = 0, kTurnRight = 1, kGoStraight = 2, kStop = 3 };
inline constexpr int kNumCommands = 4;

std::string_view CommandName(Command c);
Command CommandFromName(std::string_view name);

struct LaneElement {
  int id = 0;
  std::vector<Vec2> centerline;
  std::vector<Vec2> left_boundary;
  std::vector<Vec2> right_boundary;
  double width = kLaneWidth;
  std::vector<int> successors;
};

// Builds boundaries from the centerline at +-width/2.
LaneElement MakeLane(int id, std::vector<Vec2> centerline, double width,
                     std::vector<int> successors = {});

struct Obstacle {
  Vec2 center;
  double length = kEgoLength;
  double width = kEgoWidth;
  double heading = 0.0;
  Vec2 velocity;

  // Constant-velocity propagation.
  OrientedBox BoxAt(double time) const;
};

enum class LightState { kRed, kGreen };

struct TrafficLightState {
  Vec2 stop_line_a;
  Vec2 stop_line_b;
  LightState state = LightState::kRed;
  int lane_id = 0;
};

// Lateral transition from one route lane to a parallel neighbor.
struct LaneChange {
  double start_station = 0.0;
  double length = 0.0;
};

struct Scenario {
  std::string id;
  Template kind = Template::kStraightCruise;
  std::vector<LaneElement> lanes;
  std::vector<Vec2> drivable_area;
  std::vector<Obstacle> obstacles;
  std::optional<TrafficLightState> traffic_light;
  Command command = Command::kGoStraight;
  Pose2D ego_start;
  double ego_speed = 0.0;
  double speed_limit = 10.0;
  std::vector<int> route;
  std::optional<LaneChange> lane_change;
  Trajectory expert;
  uint64_t rng_seed = 0;

  const LaneElement& Lane(int lane_id) const;
};

// Ego-frame trajectory mapped through ego_start.
Trajectory ToWorldFrame(const Trajectory& t, const Pose2D& ego_start);

// Centerline the expert tracks: route lanes joined end to end, with the lane
// change (if any) blended as a raised-cosine lateral shift. World frame.
std::vector<Vec2> RoutePath(const Scenario& s);

OrientedBox EgoBox(const Pose2D& world_pose);

// Earliest waypoint index whose ego footprint overlaps an obstacle at that
// waypoint's time, or nullopt.
std::optional<int> Collides(const Trajectory& t, const Scenario& s);

// Fraction of waypoints whose footprint corners all lie in the drivable area.
double InsideDrivable(const Trajectory& t, const Scenario& s);

// Nearest lane centerline to a world point.
struct LaneAssociation {
  int lane_id = -1;
  PolylineProjection projection;
};
LaneAssociation AssociateLane(Vec2 world_point, const Scenario& s);

// True if the expert is inside the drivable area and collision free.
bool ExpertIsValid(const Scenario& s);

// Translates every world-frame entity (and ego_start) by (dx, dy).
Scenario Translated(const Scenario& s, double dx, double dy);

nlohmann::json ToJson(const Scenario& s);
Scenario ScenarioFromJson(const nlohmann::json& j);

// Throws std::invalid_argument with a message naming the first violation.
void ValidateScenarioJson(const nlohmann::json& j);

}  // namespace anchorplan

#endif  // ANCHORPLAN_SCENARIO_H_
