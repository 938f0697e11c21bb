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


#ifndef ANCHORPLAN_RENDER_H_
#define ANCHORPLAN_RENDER_H_

#include <string>
#include <vector>

#include "anchorplan/anchors.h"
#include "anchorplan/geometry.h"
#include "anchorplan/planner.h"
#include "anchorplan/scenario.h"

namespace anchorplan {

// World-to-SVG affine map: svg = (a x + c y + e, b x + d y + f). The root
// element declares it as data-transform="a b c d e f".
struct ViewTransform {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0, e = 0.0, f = 0.0;

  Vec2 Apply(Vec2 world) const;
  Vec2 Invert(Vec2 svg) const;
  std::string ToAttribute() const;
  static ViewTransform FromAttribute(const std::string& attr);
};

struct RenderOptions {
  double pixels_per_meter = 8.0;
  double margin = 8.0;  // meters around the content
};

// Fits the ego start, expert, obstacles and every trajectory (ego frame).
ViewTransform FitView(const Scenario& s,
                      const std::vector<FlatTrajectory>& trajectories,
                      const RenderOptions& opts, double* width,
                      double* height);

// Lanes, drivable area, obstacles and stop line; one polyline per anchor
// (class "anchor static" in gray or "anchor dynamic" in a per-head
// color); the expert in green (id "ground-truth"); the selected candidate
// in purple (id "selected"). Trajectories are ego-frame and drawn in the
// world frame through s.ego_start, one SVG point per waypoint.
std::string RenderSvg(const Scenario& s, const AnchorSet& anchors,
                      const PlanResult& plan,
                      const RenderOptions& opts = {});

}  // namespace anchorplan

#endif  // ANCHORPLAN_RENDER_H_
