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


#include "anchorplan/render.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace anchorplan {

namespace {

constexpr const char* kStaticColor = "#9e9e9e";
constexpr const char* kDynamicColors[] = {"#e6550d", "#3182bd", "#d6a100",
                                          "#17becf"};
constexpr const char* kExpertColor = "#2ca02c";
constexpr const char* kSelectedColor = "#800080";

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string Points(const std::vector<Vec2>& world, const ViewTransform& t) {
  std::string out;
  for (size_t i = 0; i < world.size(); ++i) {
    const Vec2 p = t.Apply(world[i]);
    if (i > 0) out += ' ';
    out += Num(p.x) + "," + Num(p.y);
  }
  return out;
}

std::vector<Vec2> WorldPath(const FlatTrajectory& f, const Pose2D& start) {
  std::vector<Vec2> out;
  for (int i = 0; i < f.horizon(); ++i) {
    out.push_back(ToWorld({f.values[2 * i], f.values[2 * i + 1]},
                          {start.x, start.y}, start.heading));
  }
  return out;
}

void Polyline(std::ostringstream& os, const std::vector<Vec2>& world,
              const ViewTransform& t, const std::string& attrs) {
  os << "  <polyline " << attrs << " fill=\"none\" points=\""
     << Points(world, t) << "\"/>\n";
}

void Polygon(std::ostringstream& os, const std::vector<Vec2>& world,
             const ViewTransform& t, const std::string& attrs) {
  os << "  <polygon " << attrs << " points=\"" << Points(world, t)
     << "\"/>\n";
}

}  // namespace

Vec2 ViewTransform::Apply(Vec2 p) const {
  return {a * p.x + c * p.y + e, b * p.x + d * p.y + f};
}

Vec2 ViewTransform::Invert(Vec2 q) const {
  const double det = a * d - b * c;
  if (det == 0.0) throw std::invalid_argument("view transform is singular");
  const double x = q.x - e;
  const double y = q.y - f;
  return {(d * x - c * y) / det, (-b * x + a * y) / det};
}

std::string ViewTransform::ToAttribute() const {
  return Num(a) + " " + Num(b) + " " + Num(c) + " " + Num(d) + " " + Num(e) +
         " " + Num(f);
}

ViewTransform ViewTransform::FromAttribute(const std::string& attr) {
  std::istringstream in(attr);
  ViewTransform t;
  if (!(in >> t.a >> t.b >> t.c >> t.d >> t.e >> t.f)) {
    throw std::invalid_argument("view transform: expected six numbers");
  }
  return t;
}

ViewTransform FitView(const Scenario& s,
                      const std::vector<FlatTrajectory>& trajectories,
                      const RenderOptions& opts, double* width,
                      double* height) {
  double x0 = std::numeric_limits<double>::infinity(), y0 = x0;
  double x1 = -x0, y1 = -x0;
  auto grow = [&](Vec2 p) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) return;
    x0 = std::min(x0, p.x);
    y0 = std::min(y0, p.y);
    x1 = std::max(x1, p.x);
    y1 = std::max(y1, p.y);
  };
  grow({s.ego_start.x, s.ego_start.y});
  for (const Pose2D& w : ToWorldFrame(s.expert, s.ego_start).waypoints) {
    grow({w.x, w.y});
  }
  for (const FlatTrajectory& f : trajectories) {
    for (Vec2 p : WorldPath(f, s.ego_start)) grow(p);
  }
  for (const Obstacle& o : s.obstacles) grow(o.center);
  const double m = opts.margin;
  const double k = opts.pixels_per_meter;
  *width = (x1 - x0 + 2 * m) * k;
  *height = (y1 - y0 + 2 * m) * k;
  ViewTransform t;
  t.a = k;
  t.d = -k;  // SVG y grows downward
  t.e = (m - x0) * k;
  t.f = (y1 + m) * k;
  return t;
}

std::string RenderSvg(const Scenario& s, const AnchorSet& anchors,
                      const PlanResult& plan, const RenderOptions& opts) {
  if (plan.selected < 0 ||
      plan.selected >= static_cast<int>(plan.candidates.size())) {
    throw std::invalid_argument("render: plan has no selected candidate");
  }
  std::vector<FlatTrajectory> all = anchors.anchors;
  all.push_back(plan.candidates[plan.selected]);
  double width = 0.0, height = 0.0;
  const ViewTransform t = FitView(s, all, opts, &width, &height);

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << Num(width)
     << "\" height=\"" << Num(height) << "\" viewBox=\"0 0 " << Num(width)
     << " " << Num(height) << "\" data-transform=\"" << t.ToAttribute()
     << "\" data-scenario=\"" << s.id << "\">\n";
  os << "  <rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  if (!s.drivable_area.empty()) {
    Polygon(os, s.drivable_area, t,
            "class=\"drivable\" fill=\"#eeeeee\" stroke=\"#bdbdbd\"");
  }
  for (const LaneElement& lane : s.lanes) {
    const std::string id = std::to_string(lane.id);
    Polyline(os, lane.left_boundary, t,
             "class=\"lane-boundary\" stroke=\"#757575\" stroke-width=\"1\"");
    Polyline(os, lane.right_boundary, t,
             "class=\"lane-boundary\" stroke=\"#757575\" stroke-width=\"1\"");
    Polyline(os, lane.centerline, t,
             "class=\"lane\" data-lane=\"" + id +
                 "\" stroke=\"#bdbdbd\" stroke-dasharray=\"6 4\"");
  }
  if (s.traffic_light) {
    const bool red = s.traffic_light->state == LightState::kRed;
    Polyline(os, {s.traffic_light->stop_line_a, s.traffic_light->stop_line_b},
             t,
             std::string("class=\"stop-line\" stroke=\"") +
                 (red ? "#d62728" : "#2ca02c") + "\" stroke-width=\"3\"");
  }
  for (const Obstacle& o : s.obstacles) {
    const auto c = OrientedBox{o.center, o.length, o.width, o.heading}.Corners();
    Polygon(os, {c.begin(), c.end()}, t,
            "class=\"obstacle\" fill=\"#636363\" stroke=\"#252525\"");
  }
  {
    const auto c = EgoBox(s.ego_start).Corners();
    Polygon(os, {c.begin(), c.end()}, t,
            "class=\"ego\" fill=\"#9ecae1\" stroke=\"#08519c\"");
  }
  int dynamic_seen = 0;
  for (size_t i = 0; i < anchors.anchors.size(); ++i) {
    const bool dynamic = anchors.provenance[i] == AnchorSource::kDynamic;
    const std::string color =
        dynamic ? kDynamicColors[dynamic_seen++ % 4] : kStaticColor;
    Polyline(os, WorldPath(anchors.anchors[i], s.ego_start), t,
             std::string("class=\"anchor ") + (dynamic ? "dynamic" : "static") +
                 "\" data-index=\"" + std::to_string(i) + "\" stroke=\"" +
                 color + "\" stroke-width=\"1.5\"");
  }
  std::vector<Vec2> expert;
  for (const Pose2D& w : ToWorldFrame(s.expert, s.ego_start).waypoints) {
    expert.push_back({w.x, w.y});
  }
  Polyline(os, expert, t,
           std::string("id=\"ground-truth\" class=\"expert\" stroke=\"") +
               kExpertColor + "\" stroke-width=\"3\"");
  Polyline(os, WorldPath(plan.candidates[plan.selected], s.ego_start), t,
           std::string("id=\"selected\" class=\"selected\" data-index=\"") +
               std::to_string(plan.selected) + "\" stroke=\"" +
               kSelectedColor + "\" stroke-width=\"3\"");
  os << "</svg>\n";
  return os.str();
}

}  // namespace anchorplan
