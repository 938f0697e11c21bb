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

#include <cmath>
#include <stdexcept>

#include "anchorplan/scenario.h"

namespace anchorplan {

using nlohmann::json;

namespace {

json PointJson(Vec2 p) { return json::array({p.x, p.y}); }

json PolylineJson(const std::vector<Vec2>& pts) {
  json arr = json::array();
  for (const Vec2& p : pts) arr.push_back(PointJson(p));
  return arr;
}

Vec2 PointFromJson(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

std::vector<Vec2> PolylineFromJson(const json& j) {
  std::vector<Vec2> pts;
  for (const auto& p : j) pts.push_back(PointFromJson(p));
  return pts;
}

[[noreturn]] void Fail(const std::string& what) {
  throw std::invalid_argument("scenario schema: " + what);
}

void RequireNumber(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    Fail(where + "." + key + " must be a number");
  }
  if (!std::isfinite(j.at(key).get<double>())) {
    Fail(where + "." + key + " must be finite");
  }
}

void RequirePoint(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() ||
      !j[1].is_number()) {
    Fail(where + " must be [x, y]");
  }
}

void RequirePolyline(const json& j, const std::string& where, size_t min) {
  if (!j.is_array() || j.size() < min) {
    Fail(where + " must have at least " + std::to_string(min) + " points");
  }
  for (size_t i = 0; i < j.size(); ++i) {
    RequirePoint(j[i], where + "[" + std::to_string(i) + "]");
  }
}

}  // namespace

json ToJson(const Scenario& s) {
  json lanes = json::array();
  for (const LaneElement& lane : s.lanes) {
    lanes.push_back({{"id", lane.id},
                     {"width", lane.width},
                     {"centerline", PolylineJson(lane.centerline)},
                     {"left_boundary", PolylineJson(lane.left_boundary)},
                     {"right_boundary", PolylineJson(lane.right_boundary)},
                     {"successors", lane.successors}});
  }
  json obstacles = json::array();
  for (const Obstacle& o : s.obstacles) {
    obstacles.push_back({{"center", PointJson(o.center)},
                         {"length", o.length},
                         {"width", o.width},
                         {"heading", o.heading},
                         {"velocity", PointJson(o.velocity)}});
  }
  json light = nullptr;
  if (s.traffic_light) {
    light = {{"stop_line", json::array({PointJson(s.traffic_light->stop_line_a),
                                        PointJson(s.traffic_light->stop_line_b)})},
             {"state", s.traffic_light->state == LightState::kRed ? "Red"
                                                                  : "Green"},
             {"lane_id", s.traffic_light->lane_id}};
  }
  json lane_change = nullptr;
  if (s.lane_change) {
    lane_change = {{"start_station", s.lane_change->start_station},
                   {"length", s.lane_change->length}};
  }
  return {{"id", s.id},
          {"template", TemplateName(s.kind)},
          {"rng_seed", s.rng_seed},
          {"command", CommandName(s.command)},
          {"ego_start",
           {{"x", s.ego_start.x},
            {"y", s.ego_start.y},
            {"heading", s.ego_start.heading}}},
          {"ego_speed", s.ego_speed},
          {"speed_limit", s.speed_limit},
          {"route", s.route},
          {"lane_change", lane_change},
          {"lanes", lanes},
          {"drivable_area", PolylineJson(s.drivable_area)},
          {"obstacles", obstacles},
          {"traffic_light", light},
          {"expert", ToJson(s.expert)}};
}

Scenario ScenarioFromJson(const json& j) {
  ValidateScenarioJson(j);
  Scenario s;
  s.id = j.at("id").get<std::string>();
  s.kind = TemplateFromName(j.at("template").get<std::string>());
  s.rng_seed = j.at("rng_seed").get<uint64_t>();
  s.command = CommandFromName(j.at("command").get<std::string>());
  const json& ego = j.at("ego_start");
  s.ego_start.x = ego.at("x").get<double>();
  s.ego_start.y = ego.at("y").get<double>();
  s.ego_start.heading = ego.at("heading").get<double>();
  s.ego_speed = j.at("ego_speed").get<double>();
  s.speed_limit = j.at("speed_limit").get<double>();
  s.route = j.at("route").get<std::vector<int>>();
  if (!j.at("lane_change").is_null()) {
    s.lane_change = LaneChange{
        j.at("lane_change").at("start_station").get<double>(),
        j.at("lane_change").at("length").get<double>()};
  }
  for (const auto& lj : j.at("lanes")) {
    LaneElement lane;
    lane.id = lj.at("id").get<int>();
    lane.width = lj.at("width").get<double>();
    lane.centerline = PolylineFromJson(lj.at("centerline"));
    lane.left_boundary = PolylineFromJson(lj.at("left_boundary"));
    lane.right_boundary = PolylineFromJson(lj.at("right_boundary"));
    lane.successors = lj.at("successors").get<std::vector<int>>();
    s.lanes.push_back(std::move(lane));
  }
  s.drivable_area = PolylineFromJson(j.at("drivable_area"));
  for (const auto& oj : j.at("obstacles")) {
    Obstacle o;
    o.center = PointFromJson(oj.at("center"));
    o.length = oj.at("length").get<double>();
    o.width = oj.at("width").get<double>();
    o.heading = oj.at("heading").get<double>();
    o.velocity = PointFromJson(oj.at("velocity"));
    s.obstacles.push_back(o);
  }
  if (!j.at("traffic_light").is_null()) {
    const json& tl = j.at("traffic_light");
    TrafficLightState light;
    light.stop_line_a = PointFromJson(tl.at("stop_line").at(0));
    light.stop_line_b = PointFromJson(tl.at("stop_line").at(1));
    light.state = tl.at("state").get<std::string>() == "Red"
                      ? LightState::kRed
                      : LightState::kGreen;
    light.lane_id = tl.at("lane_id").get<int>();
    s.traffic_light = light;
  }
  s.expert = TrajectoryFromJson(j.at("expert"));
  return s;
}

void ValidateScenarioJson(const json& j) {
  if (!j.is_object()) Fail("root must be an object");
  for (const char* key :
       {"id", "template", "rng_seed", "command", "ego_start", "ego_speed",
        "speed_limit", "route", "lane_change", "lanes", "drivable_area",
        "obstacles", "traffic_light", "expert"}) {
    if (!j.contains(key)) Fail(std::string("missing key ") + key);
  }
  if (!j.at("id").is_string()) Fail("id must be a string");
  try {
    TemplateFromName(j.at("template").get<std::string>());
    CommandFromName(j.at("command").get<std::string>());
  } catch (const std::exception& e) {
    Fail(e.what());
  }
  if (!j.at("rng_seed").is_number_unsigned()) Fail("rng_seed must be u64");
  for (const char* k : {"x", "y", "heading"}) {
    RequireNumber(j.at("ego_start"), k, "ego_start");
  }
  RequireNumber(j, "ego_speed", "root");
  RequireNumber(j, "speed_limit", "root");
  if (!j.at("route").is_array() || j.at("route").empty()) {
    Fail("route must be a non-empty array");
  }
  if (!j.at("lanes").is_array() || j.at("lanes").empty()) {
    Fail("lanes must be a non-empty array");
  }
  for (size_t i = 0; i < j.at("lanes").size(); ++i) {
    const json& lane = j.at("lanes")[i];
    const std::string where = "lanes[" + std::to_string(i) + "]";
    if (!lane.contains("id") || !lane.at("id").is_number_integer()) {
      Fail(where + ".id must be an integer");
    }
    RequireNumber(lane, "width", where);
    for (const char* k : {"centerline", "left_boundary", "right_boundary"}) {
      if (!lane.contains(k)) Fail(where + " missing " + k);
      RequirePolyline(lane.at(k), where + "." + k, 2);
    }
    if (!lane.contains("successors") || !lane.at("successors").is_array()) {
      Fail(where + ".successors must be an array");
    }
  }
  RequirePolyline(j.at("drivable_area"), "drivable_area", 3);
  if (!j.at("obstacles").is_array()) Fail("obstacles must be an array");
  for (size_t i = 0; i < j.at("obstacles").size(); ++i) {
    const json& o = j.at("obstacles")[i];
    const std::string where = "obstacles[" + std::to_string(i) + "]";
    RequirePoint(o.at("center"), where + ".center");
    RequirePoint(o.at("velocity"), where + ".velocity");
    for (const char* k : {"length", "width", "heading"}) {
      RequireNumber(o, k, where);
    }
    if (o.at("length").get<double>() <= 0 || o.at("width").get<double>() <= 0) {
      Fail(where + " extent must be positive");
    }
  }
  if (!j.at("traffic_light").is_null()) {
    const json& tl = j.at("traffic_light");
    RequirePolyline(tl.at("stop_line"), "traffic_light.stop_line", 2);
    const std::string state = tl.at("state").get<std::string>();
    if (state != "Red" && state != "Green") Fail("traffic_light.state");
  }
  const json& expert = j.at("expert");
  RequireNumber(expert, "dt", "expert");
  if (!expert.contains("waypoints") || !expert.at("waypoints").is_array() ||
      expert.at("waypoints").empty()) {
    Fail("expert.waypoints must be a non-empty array");
  }
  for (const auto& w : expert.at("waypoints")) {
    for (const char* k : {"x", "y", "heading"}) {
      RequireNumber(w, k, "expert.waypoints[]");
    }
  }
}

}  // namespace anchorplan
