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

#include "anchorplan/geometry.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace anchorplan {

double Vec2::Norm() const { return std::hypot(x, y); }

Vec2 ToWorld(Vec2 local, Vec2 origin, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {origin.x + c * local.x - s * local.y,
          origin.y + s * local.x + c * local.y};
}

Vec2 ToLocal(Vec2 world, Vec2 origin, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const Vec2 d = world - origin;
  return {c * d.x + s * d.y, -s * d.x + c * d.y};
}

std::array<Vec2, 4> OrientedBox::Corners() const {
  const double hl = 0.5 * length;
  const double hw = 0.5 * width;
  return {ToWorld({hl, hw}, center, heading),
          ToWorld({-hl, hw}, center, heading),
          ToWorld({-hl, -hw}, center, heading),
          ToWorld({hl, -hw}, center, heading)};
}

namespace {

// Half-extent of `box` projected on unit axis `axis`.
double ProjectedRadius(const OrientedBox& box, Vec2 axis) {
  const Vec2 u{std::cos(box.heading), std::sin(box.heading)};
  const Vec2 v{-u.y, u.x};
  return 0.5 * box.length * std::abs(u.Dot(axis)) +
         0.5 * box.width * std::abs(v.Dot(axis));
}

}  // namespace

bool BoxesOverlap(const OrientedBox& a, const OrientedBox& b) {
  const Vec2 d = b.center - a.center;
  const Vec2 axes[4] = {
      {std::cos(a.heading), std::sin(a.heading)},
      {-std::sin(a.heading), std::cos(a.heading)},
      {std::cos(b.heading), std::sin(b.heading)},
      {-std::sin(b.heading), std::cos(b.heading)},
  };
  for (const Vec2& axis : axes) {
    const double gap = std::abs(d.Dot(axis)) - ProjectedRadius(a, axis) -
                       ProjectedRadius(b, axis);
    if (gap >= 0.0) return false;
  }
  return true;
}

bool SegmentsIntersect(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
  auto orient = [](Vec2 p, Vec2 q, Vec2 r) { return (q - p).Cross(r - p); };
  auto on_segment = [](Vec2 p, Vec2 q, Vec2 r) {
    return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) &&
           std::min(p.y, q.y) <= r.y && r.y <= std::max(p.y, q.y);
  };
  const double d1 = orient(b0, b1, a0);
  const double d2 = orient(b0, b1, a1);
  const double d3 = orient(a0, a1, b0);
  const double d4 = orient(a0, a1, b1);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  if (d1 == 0 && on_segment(b0, b1, a0)) return true;
  if (d2 == 0 && on_segment(b0, b1, a1)) return true;
  if (d3 == 0 && on_segment(a0, a1, b0)) return true;
  if (d4 == 0 && on_segment(a0, a1, b1)) return true;
  return false;
}

bool PointInPolygon(Vec2 p, std::span<const Vec2> polygon) {
  const size_t n = polygon.size();
  if (n < 3) return false;
  bool inside = false;
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = polygon[j];
    const Vec2 b = polygon[i];
    // on-edge check
    if ((b - a).Cross(p - a) == 0.0 && std::min(a.x, b.x) <= p.x &&
        p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
        p.y <= std::max(a.y, b.y)) {
      return true;
    }
    if ((b.y > p.y) != (a.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

double PolygonArea(std::span<const Vec2> polygon) {
  double twice = 0.0;
  for (size_t i = 0, j = polygon.size() - 1; i < polygon.size(); j = i++) {
    twice += polygon[j].Cross(polygon[i]);
  }
  return 0.5 * twice;
}

PolylineProjection ProjectOntoPolyline(Vec2 p, std::span<const Vec2> line) {
  PolylineProjection best;
  best.distance = std::numeric_limits<double>::infinity();
  double station = 0.0;
  for (size_t i = 0; i + 1 < line.size(); ++i) {
    const Vec2 a = line[i];
    const Vec2 seg = line[i + 1] - a;
    const double len = seg.Norm();
    if (len == 0.0) continue;
    const Vec2 u = seg * (1.0 / len);
    const double s = std::clamp((p - a).Dot(u), 0.0, len);
    const Vec2 q = a + u * s;
    const double dist = (p - q).Norm();
    if (dist < best.distance) {
      best.distance = dist;
      best.lateral = u.Cross(p - a);
      best.arclength = station + s;
      best.tangent = u;
    }
    station += len;
  }
  return best;
}

double PolylineLength(std::span<const Vec2> line) {
  double total = 0.0;
  for (size_t i = 0; i + 1 < line.size(); ++i) {
    total += (line[i + 1] - line[i]).Norm();
  }
  return total;
}

namespace {

// Segment index and local offset for station s.
std::pair<size_t, double> Locate(std::span<const Vec2> line, double s) {
  double station = 0.0;
  for (size_t i = 0; i + 1 < line.size(); ++i) {
    const double len = (line[i + 1] - line[i]).Norm();
    if (s <= station + len || i + 2 == line.size()) {
      return {i, std::clamp(s - station, 0.0, len)};
    }
    station += len;
  }
  return {0, 0.0};
}

}  // namespace

Vec2 PolylinePointAt(std::span<const Vec2> line, double s) {
  if (line.size() == 1) return line[0];
  const auto [i, local] = Locate(line, s);
  const Vec2 seg = line[i + 1] - line[i];
  const double len = seg.Norm();
  if (len == 0.0) return line[i];
  return line[i] + seg * (local / len);
}

Vec2 PolylineTangentAt(std::span<const Vec2> line, double s) {
  const auto [i, local] = Locate(line, s);
  (void)local;
  const Vec2 seg = line[i + 1] - line[i];
  const double len = seg.Norm();
  if (len == 0.0) return {1.0, 0.0};
  return seg * (1.0 / len);
}

std::vector<Vec2> OffsetPolyline(std::span<const Vec2> line, double offset) {
  std::vector<Vec2> out;
  out.reserve(line.size());
  const size_t n = line.size();
  for (size_t i = 0; i < n; ++i) {
    Vec2 t{0.0, 0.0};
    if (i > 0) {
      const Vec2 d = line[i] - line[i - 1];
      t = t + d * (1.0 / d.Norm());
    }
    if (i + 1 < n) {
      const Vec2 d = line[i + 1] - line[i];
      t = t + d * (1.0 / d.Norm());
    }
    t = t * (1.0 / t.Norm());
    const Vec2 normal{-t.y, t.x};
    out.push_back(line[i] + normal * offset);
  }
  return out;
}

std::vector<Vec2> ResamplePolyline(std::span<const Vec2> line, int count) {
  std::vector<Vec2> out;
  const double len = PolylineLength(line);
  for (int k = 0; k < count; ++k) {
    const double s = count == 1 ? 0.0 : len * k / (count - 1);
    out.push_back(PolylinePointAt(line, s));
  }
  return out;
}

}  // namespace anchorplan
