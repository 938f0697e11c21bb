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

#ifndef ANCHORPLAN_GEOMETRY_H_
#define ANCHORPLAN_GEOMETRY_H_

#include <array>
#include <span>
#include <vector>

namespace anchorplan {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double Dot(Vec2 o) const { return x * o.x + y * o.y; }
  double Cross(Vec2 o) const { return x * o.y - y * o.x; }
  double Norm() const;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

// Rotation by `angle` then translation by `origin`.
Vec2 ToWorld(Vec2 local, Vec2 origin, double angle);
Vec2 ToLocal(Vec2 world, Vec2 origin, double angle);

struct OrientedBox {
  Vec2 center;
  double length = 0.0;  // along heading
  double width = 0.0;
  double heading = 0.0;

  std::array<Vec2, 4> Corners() const;
};

// Separating-axis test. Touching boxes (zero-depth contact) do not overlap.
bool BoxesOverlap(const OrientedBox& a, const OrientedBox& b);

// Crossing-number test; points exactly on an edge count as inside.
bool PointInPolygon(Vec2 p, std::span<const Vec2> polygon);

// Proper or touching intersection of closed segments [a0,a1] and [b0,b1].
bool SegmentsIntersect(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1);

double PolygonArea(std::span<const Vec2> polygon);

struct PolylineProjection {
  double distance = 0.0;   // unsigned distance to the polyline
  double lateral = 0.0;    // signed, positive to the left of travel
  double arclength = 0.0;  // station of the projected point
  Vec2 tangent;            // unit tangent at the projection
};

PolylineProjection ProjectOntoPolyline(Vec2 p, std::span<const Vec2> line);

double PolylineLength(std::span<const Vec2> line);

// Point and unit tangent at station s (clamped to the polyline ends).
Vec2 PolylinePointAt(std::span<const Vec2> line, double s);
Vec2 PolylineTangentAt(std::span<const Vec2> line, double s);

// Offsets each vertex along its left normal by `offset` (negative = right).
std::vector<Vec2> OffsetPolyline(std::span<const Vec2> line, double offset);

// Resamples at `count` evenly spaced stations, endpoints included.
std::vector<Vec2> ResamplePolyline(std::span<const Vec2> line, int count);

}  // namespace anchorplan

#endif  // ANCHORPLAN_GEOMETRY_H_
