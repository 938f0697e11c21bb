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

#include "anchorplan/scenario_gen.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "anchorplan/rng.h"

namespace anchorplan {

namespace {

constexpr double kRoadStart = -20.0;
constexpr double kShoulder = 0.25;
constexpr double kExitLength = 60.0;

std::vector<Vec2> StraightLine(Vec2 from, Vec2 to, double spacing) {
  const int n = std::max(2, static_cast<int>(std::ceil((to - from).Norm() /
                                                       spacing)) + 1);
  std::vector<Vec2> pts;
  for (int i = 0; i < n; ++i) {
    pts.push_back(from + (to - from) * (static_cast<double>(i) / (n - 1)));
  }
  return pts;
}

// Quarter arc from (x0, 0) heading +x, turning left (sign=+1) or right (-1).
std::vector<Vec2> QuarterArc(double x0, double radius, double sign) {
  const int n = std::max(8, static_cast<int>(std::ceil(
                                radius * std::numbers::pi / 2.0 / 0.5))) + 1;
  std::vector<Vec2> pts;
  for (int i = 0; i < n; ++i) {
    const double phi = (std::numbers::pi / 2.0) * i / (n - 1);
    pts.push_back({x0 + radius * std::sin(phi),
                   sign * (radius - radius * std::cos(phi))});
  }
  return pts;
}

void AddParkedDistractors(Scenario& s, Rng& rng, double x_max) {
  const int count = static_cast<int>(rng.UniformInt(3));
  for (int i = 0; i < count; ++i) {
    Obstacle o;
    o.center.x = rng.Uniform(kRoadStart + 5.0, std::max(kRoadStart + 6.0, x_max));
    o.center.y = rng.Bernoulli(0.5) ? rng.Uniform(8.0, 12.0)
                                    : rng.Uniform(-12.0, -7.0);
    o.length = rng.Uniform(4.0, 5.2);
    o.width = rng.Uniform(1.7, 2.1);
    o.heading = rng.Uniform(-0.2, 0.2);
    s.obstacles.push_back(o);
  }
}

// Returns false if the sampled scenario should be rejected.
bool SampleTemplate(Scenario& s, Rng& rng) {
  s.obstacles.clear();
  s.traffic_light.reset();
  s.lane_change.reset();
  s.lanes.clear();
  s.ego_start = Pose2D(0.0, 0.0, 0.0);

  switch (s.kind) {
    case Template::kStraightCruise: {
      s.command = Command::kGoStraight;
      if (rng.Bernoulli(1.0 / 3.0)) {
        const double entry = rng.Uniform(4.0, 16.0);
        BuildIntersection(s, entry, rng.Uniform(10.0, 14.0));
        s.route = {0, 2, 5};
        s.ego_speed = rng.Uniform(4.0, 9.0);
        s.speed_limit = rng.Uniform(7.0, 11.0);
        AddParkedDistractors(s, rng, entry - 4.0);
      } else {
        BuildStraightRoad(s);
        s.route = {0};
        s.ego_speed = rng.Uniform(5.0, 13.0);
        s.speed_limit = rng.Uniform(8.0, 14.0);
        if (rng.Bernoulli(0.3)) {
          const double x = rng.Uniform(15.0, 50.0);
          s.traffic_light = TrafficLightState{
              {x, -0.5 * kLaneWidth}, {x, 0.5 * kLaneWidth},
              LightState::kGreen, 0};
        }
        AddParkedDistractors(s, rng, 40.0);
      }
      return true;
    }
    case Template::kLeadVehicle: {
      s.command = Command::kGoStraight;
      BuildStraightRoad(s);
      s.route = {0};
      s.ego_speed = rng.Uniform(6.0, 13.0);
      s.speed_limit = rng.Uniform(8.0, 14.0);
      Obstacle lead;
      lead.length = rng.Uniform(4.2, 5.0);
      lead.width = rng.Uniform(1.8, 2.0);
      lead.center = {0.5 * (kEgoLength + lead.length) + rng.Uniform(8.0, 30.0),
                     rng.Uniform(-0.2, 0.2)};
      lead.velocity = {rng.Uniform(0.0, 0.9) * s.ego_speed, 0.0};
      s.obstacles.push_back(lead);
      AddParkedDistractors(s, rng, 40.0);
      return true;
    }
    case Template::kLeftTurn:
    case Template::kRightTurn: {
      const bool left = s.kind == Template::kLeftTurn;
      s.command = left ? Command::kTurnLeft : Command::kTurnRight;
      const double entry = rng.Uniform(4.0, 16.0);
      BuildIntersection(s, entry, rng.Uniform(10.0, 14.0));
      s.route = left ? std::vector<int>{0, 1, 4} : std::vector<int>{0, 3, 6};
      s.ego_speed = rng.Uniform(4.0, 9.0);
      s.speed_limit = rng.Uniform(7.0, 11.0);
      AddParkedDistractors(s, rng, entry - 4.0);
      return true;
    }
    case Template::kRedLight: {
      s.command = Command::kStop;
      BuildStraightRoad(s);
      s.route = {0};
      s.ego_speed = rng.Uniform(5.0, 12.0);
      s.speed_limit = rng.Uniform(8.0, 14.0);
      const double min_x =
          std::max(12.0, s.ego_speed * s.ego_speed / (2.0 * 2.0) + 8.0);
      if (min_x > 45.0) return false;
      const double x = rng.Uniform(min_x, 45.0);
      s.traffic_light = TrafficLightState{
          {x, -0.5 * kLaneWidth}, {x, 0.5 * kLaneWidth}, LightState::kRed, 0};
      AddParkedDistractors(s, rng, 40.0);
      return true;
    }
    case Template::kLaneBlockedSwerve: {
      s.command = Command::kGoStraight;
      BuildStraightRoad(s);
      s.route = {0, 1};
      s.ego_speed = rng.Uniform(5.0, 11.0);
      s.speed_limit = rng.Uniform(8.0, 12.0);
      const double length = std::clamp(2.5 * s.ego_speed, 14.0, 30.0);
      const double start = rng.Uniform(2.0, 8.0);
      s.lane_change = LaneChange{start, length};
      Obstacle blocker;
      blocker.length = rng.Uniform(4.2, 5.0);
      blocker.width = rng.Uniform(1.8, 2.0);
      blocker.center = {start + length + rng.Uniform(0.0, 10.0),
                        rng.Uniform(-0.3, 0.3)};
      blocker.heading = rng.Uniform(-0.1, 0.1);
      s.obstacles.push_back(blocker);
      AddParkedDistractors(s, rng, 40.0);
      return true;
    }
  }
  return false;
}

}  // namespace

void BuildStraightRoad(Scenario& s, double x_end) {
  s.lanes.push_back(
      MakeLane(0, StraightLine({kRoadStart, 0.0}, {x_end, 0.0}, 1.0),
               kLaneWidth));
  s.lanes.push_back(MakeLane(
      1, StraightLine({kRoadStart, kLaneWidth}, {x_end, kLaneWidth}, 1.0),
      kLaneWidth));
  const double lo = -0.5 * kLaneWidth - kShoulder;
  const double hi = 1.5 * kLaneWidth + kShoulder;
  s.drivable_area = {{kRoadStart, lo}, {x_end, lo}, {x_end, hi},
                     {kRoadStart, hi}};
}

void BuildIntersection(Scenario& s, double entry_x, double radius) {
  const double cx = entry_x + radius;
  const double hw = 0.5 * kLaneWidth + kShoulder;
  const double east_end = cx + hw + kExitLength;
  s.lanes.push_back(MakeLane(
      0, StraightLine({kRoadStart, 0.0}, {entry_x, 0.0}, 1.0), kLaneWidth,
      {1, 2, 3}));
  s.lanes.push_back(
      MakeLane(1, QuarterArc(entry_x, radius, 1.0), kLaneWidth, {4}));
  s.lanes.push_back(MakeLane(
      2, StraightLine({entry_x, 0.0}, {cx + hw, 0.0}, 1.0), kLaneWidth, {5}));
  s.lanes.push_back(
      MakeLane(3, QuarterArc(entry_x, radius, -1.0), kLaneWidth, {6}));
  s.lanes.push_back(MakeLane(
      4, StraightLine({cx, radius}, {cx, radius + kExitLength}, 1.0),
      kLaneWidth));
  s.lanes.push_back(MakeLane(
      5, StraightLine({cx + hw, 0.0}, {east_end, 0.0}, 1.0), kLaneWidth));
  s.lanes.push_back(MakeLane(
      6, StraightLine({cx, -radius}, {cx, -radius - kExitLength}, 1.0),
      kLaneWidth));
  const double north = radius + kExitLength;
  s.drivable_area = {
      {kRoadStart, -hw}, {entry_x, -hw},   {entry_x, -radius},
      {cx - hw, -radius}, {cx - hw, -north}, {cx + hw, -north},
      {cx + hw, -hw},    {east_end, -hw},  {east_end, hw},
      {cx + hw, hw},     {cx + hw, north},  {cx - hw, north},
      {cx - hw, radius},  {entry_x, radius}, {entry_x, hw},
      {kRoadStart, hw}};
}

double MinLeaderGap(const Scenario& s) {
  double best = std::numeric_limits<double>::infinity();
  const Trajectory world = ToWorldFrame(s.expert, s.ego_start);
  for (const Obstacle& obs : s.obstacles) {
    for (int i = 0; i < world.horizon(); ++i) {
      const OrientedBox box = obs.BoxAt((i + 1) * s.expert.dt);
      const Vec2 ego{world.waypoints[i].x, world.waypoints[i].y};
      const Vec2 d = ToLocal(box.center, ego, world.waypoints[i].heading);
      if (d.x <= 0.0 || std::abs(d.y) > 0.5 * (kEgoWidth + obs.width)) {
        continue;
      }
      best = std::min(best, d.x - 0.5 * (kEgoLength + obs.length));
    }
  }
  return best;
}

uint64_t ScenarioSeed(uint64_t base_seed, Template kind, int index) {
  return MixSeed(MixSeed(base_seed, static_cast<uint64_t>(kind) + 1),
                 static_cast<uint64_t>(index));
}

Scenario GenerateScenario(uint64_t seed, Template kind,
                          const ExpertConfig& expert) {
  Rng rng(MixSeed(seed, static_cast<uint64_t>(kind) + 101));
  Scenario s;
  s.kind = kind;
  s.rng_seed = seed;
  char id[64];
  std::snprintf(id, sizeof(id), "%s-%016llx", TemplateName(kind).data(),
                static_cast<unsigned long long>(seed));
  s.id = id;
  for (int attempt = 0; attempt < kMaxGenerationAttempts; ++attempt) {
    if (!SampleTemplate(s, rng)) continue;
    try {
      s.expert = ExpertPlan(s, expert);
    } catch (const InfeasibleScenario&) {
      continue;
    }
    if (!ExpertIsValid(s)) continue;
    if (MinLeaderGap(s) < expert.standstill_gap - 1e-9) continue;
    return s;
  }
  throw InfeasibleScenario("no valid " + std::string(TemplateName(kind)) +
                           " scenario after bounded retries");
}

std::vector<Scenario> GenerateBatch(uint64_t base_seed, int count_per_template,
                                    const ExpertConfig& expert) {
  const int total = count_per_template * static_cast<int>(kAllTemplates.size());
  std::vector<Scenario> out(total);
  std::vector<std::exception_ptr> errors(total);
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < total; ++k) {
    const Template kind = kAllTemplates[k / count_per_template];
    const int index = k % count_per_template;
    try {
      out[k] = GenerateScenario(ScenarioSeed(base_seed, kind, index), kind,
                                expert);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace anchorplan
