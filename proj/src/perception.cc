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

#include "anchorplan/perception.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace anchorplan {

namespace {

// Longest run of `line` (ego frame) inside the centered square of side
// 2 * half, densified at ~0.5 m. Returns the whole line when no part is
// inside, so every lane still yields a token.
std::vector<Vec2> CropToSquare(const std::vector<Vec2>& line, double half) {
  const int n = std::max(
      2, static_cast<int>(std::ceil(PolylineLength(line) / 0.5)) + 1);
  const std::vector<Vec2> dense = ResamplePolyline(line, n);
  size_t best_start = 0, best_len = 0;
  for (size_t i = 0; i < dense.size();) {
    if (std::abs(dense[i].x) > half || std::abs(dense[i].y) > half) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < dense.size() && std::abs(dense[j].x) <= half &&
           std::abs(dense[j].y) <= half) {
      ++j;
    }
    if (j - i > best_len) {
      best_start = i;
      best_len = j - i;
    }
    i = j;
  }
  if (best_len < 2) return line;
  return {dense.begin() + best_start, dense.begin() + best_start + best_len};
}

struct Aabb {
  double x0, y0, x1, y1;
  bool Contains(Vec2 p) const {
    return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
  }
};

Aabb BoundsOf(std::span<const Vec2> pts, double pad) {
  Aabb b{std::numeric_limits<double>::infinity(),
         std::numeric_limits<double>::infinity(),
         -std::numeric_limits<double>::infinity(),
         -std::numeric_limits<double>::infinity()};
  for (const Vec2& p : pts) {
    b.x0 = std::min(b.x0, p.x);
    b.y0 = std::min(b.y0, p.y);
    b.x1 = std::max(b.x1, p.x);
    b.y1 = std::max(b.y1, p.y);
  }
  b.x0 -= pad;
  b.y0 -= pad;
  b.x1 += pad;
  b.y1 += pad;
  return b;
}

bool InsideBox(Vec2 p, const OrientedBox& box) {
  const Vec2 local = ToLocal(p, box.center, box.heading);
  return std::abs(local.x) <= 0.5 * box.length &&
         std::abs(local.y) <= 0.5 * box.width;
}

double SegmentDistance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = ab.Dot(ab);
  const double u = len2 > 0.0 ? std::clamp((p - a).Dot(ab) / len2, 0.0, 1.0)
                              : 0.0;
  return (p - (a + ab * u)).Norm();
}

// Precomputed world geometry shared by all cells.
struct RasterContext {
  const Scenario* scenario;
  PerceptionConfig cfg;
  Vec2 ego_origin;
  double ego_heading;
  Aabb drivable_bounds;
  std::vector<Aabb> lane_bounds;
  std::vector<OrientedBox> boxes;
  std::vector<Aabb> box_bounds;
};

RasterContext MakeContext(const Scenario& s, const PerceptionConfig& cfg) {
  RasterContext ctx{&s, cfg, {s.ego_start.x, s.ego_start.y},
                    s.ego_start.heading, BoundsOf(s.drivable_area, 0.0),
                    {}, {}, {}};
  for (const LaneElement& lane : s.lanes) {
    ctx.lane_bounds.push_back(BoundsOf(lane.centerline, 0.5 * lane.width));
  }
  for (const Obstacle& o : s.obstacles) {
    const OrientedBox box = o.BoxAt(0.0);
    const auto corners = box.Corners();
    ctx.boxes.push_back(box);
    ctx.box_bounds.push_back(BoundsOf(corners, 0.0));
  }
  return ctx;
}

void RasterizeRow(const RasterContext& ctx, int row, std::vector<double>& out) {
  const PerceptionConfig& cfg = ctx.cfg;
  const Scenario& s = *ctx.scenario;
  const int g = cfg.grid;
  const int n = cfg.supersample;
  const double cell = cfg.cell_size();
  const double inv = 1.0 / (n * n);
  for (int col = 0; col < g; ++col) {
    double drivable = 0.0;
    double occupancy = 0.0;
    double stop = 0.0;
    for (int sy = 0; sy < n; ++sy) {
      for (int sx = 0; sx < n; ++sx) {
        const Vec2 local{-0.5 * cfg.extent + (col + (sx + 0.5) / n) * cell,
                         -0.5 * cfg.extent + (row + (sy + 0.5) / n) * cell};
        const Vec2 w = ToWorld(local, ctx.ego_origin, ctx.ego_heading);
        if (ctx.drivable_bounds.Contains(w) &&
            PointInPolygon(w, s.drivable_area)) {
          drivable += 1.0;
        }
        for (size_t k = 0; k < ctx.boxes.size(); ++k) {
          if (ctx.box_bounds[k].Contains(w) && InsideBox(w, ctx.boxes[k])) {
            occupancy += 1.0;
            break;
          }
        }
        if (s.traffic_light &&
            SegmentDistance(w, s.traffic_light->stop_line_a,
                            s.traffic_light->stop_line_b) <=
                cfg.stop_line_halo) {
          stop += s.traffic_light->state == LightState::kRed ? 1.0 : 0.5;
        }
      }
    }
    // Lane-center proximity at the cell center only.
    const Vec2 center = ToWorld(CellCenter(cfg, row, col), ctx.ego_origin,
                                ctx.ego_heading);
    double proximity = 0.0;
    for (size_t k = 0; k < s.lanes.size(); ++k) {
      if (!ctx.lane_bounds[k].Contains(center)) continue;
      const LaneElement& lane = s.lanes[k];
      const double d = ProjectOntoPolyline(center, lane.centerline).distance;
      proximity = std::max(proximity, 1.0 - d / (0.5 * lane.width));
    }
    out[(kDrivableChannel * g + row) * g + col] = drivable * inv;
    out[(kLaneCenterChannel * g + row) * g + col] = std::max(0.0, proximity);
    out[(kOccupancyChannel * g + row) * g + col] = occupancy * inv;
    out[(kStopLineChannel * g + row) * g + col] = stop * inv;
  }
}

}  // namespace

Vec2 CellCenter(const PerceptionConfig& cfg, int row, int col) {
  const double cell = cfg.cell_size();
  return {-0.5 * cfg.extent + (col + 0.5) * cell,
          -0.5 * cfg.extent + (row + 0.5) * cell};
}

std::vector<double> RasterizeBevSerial(const Scenario& s,
                                       const PerceptionConfig& cfg) {
  const RasterContext ctx = MakeContext(s, cfg);
  std::vector<double> out(kNumBevChannels * cfg.grid * cfg.grid, 0.0);
  for (int row = 0; row < cfg.grid; ++row) RasterizeRow(ctx, row, out);
  return out;
}

std::vector<double> RasterizeBevParallel(const Scenario& s,
                                         const PerceptionConfig& cfg) {
  const RasterContext ctx = MakeContext(s, cfg);
  std::vector<double> out(kNumBevChannels * cfg.grid * cfg.grid, 0.0);
#pragma omp parallel for schedule(static)
  for (int row = 0; row < cfg.grid; ++row) RasterizeRow(ctx, row, out);
  return out;
}

std::vector<double> CommandOneHot(Command c) {
  std::vector<double> v(kNumCommands, 0.0);
  v[static_cast<int>(c)] = 1.0;
  return v;
}

PerceptionBundle ExtractPerception(const Scenario& s,
                                   const PerceptionConfig& cfg) {
  PerceptionBundle b;
  b.grid = cfg.grid;
  b.bev = RasterizeBevSerial(s, cfg);

  const Vec2 origin{s.ego_start.x, s.ego_start.y};
  const double heading = s.ego_start.heading;
  const double half = 0.5 * cfg.extent;
  for (const Obstacle& o : s.obstacles) {
    const Vec2 c = ToLocal(o.center, origin, heading);
    const Vec2 v = ToLocal(o.velocity, {0.0, 0.0}, heading);
    const double rel = o.heading - heading;
    b.object_tokens.push_back({c.x / half, c.y / half, o.length / 5.0,
                               o.width / 2.0, std::sin(rel), std::cos(rel),
                               v.x / 10.0, v.y / 10.0});
  }
  for (const LaneElement& lane : s.lanes) {
    std::vector<double> token;
    token.reserve(cfg.map_width());
    std::vector<Vec2> local;
    for (const Vec2& p : lane.centerline) {
      local.push_back(ToLocal(p, origin, heading));
    }
    for (const Vec2& p :
         ResamplePolyline(CropToSquare(local, half), cfg.map_points)) {
      token.push_back(p.x / half);
      token.push_back(p.y / half);
    }
    token.push_back(lane.width / kLaneWidth);
    token.push_back(s.speed_limit / 10.0);
    b.map_tokens.push_back(std::move(token));
  }
  b.command_token = CommandOneHot(s.command);
  b.ego_token = {s.ego_speed / 10.0};
  return b;
}

}  // namespace anchorplan
