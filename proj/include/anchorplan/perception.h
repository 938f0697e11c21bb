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

#ifndef ANCHORPLAN_PERCEPTION_H_
#define ANCHORPLAN_PERCEPTION_H_

#include <vector>

#include "anchorplan/scenario.h"

namespace anchorplan {

enum BevChannel : int {
  kDrivableChannel = 0,
  kLaneCenterChannel = 1,
  kOccupancyChannel = 2,
  kStopLineChannel = 3,
  kNumBevChannels = 4,
};

struct PerceptionConfig {
  int grid = 32;          // cells per side
  double extent = 64.0;   // meters per side, ego-centered
  int supersample = 5;    // sub-points per cell side
  int map_points = 6;     // centerline samples per map token
  double stop_line_halo = 0.75;

  double cell_size() const { return extent / grid; }
  static constexpr int object_width() { return 8; }
  int map_width() const { return 2 * map_points + 2; }
  static constexpr int command_width() { return kNumCommands; }
  static constexpr int ego_width() { return 1; }
};

// Ground-truth stand-in for a perception stack, all in the ego frame.
struct PerceptionBundle {
  int grid = 0;
  // [channel][row][col]; row indexes ego-frame y, col indexes x.
  std::vector<double> bev;
  // (x, y, length, width, sin, cos, vx, vy), normalized.
  std::vector<std::vector<double>> object_tokens;
  // Centerline samples within the raster square plus (width, speed
  // limit), normalized.
  std::vector<std::vector<double>> map_tokens;
  std::vector<double> command_token;
  // Ego status (speed); not one of the maskable streams.
  std::vector<double> ego_token;

  double Bev(int channel, int row, int col) const {
    return bev[(channel * grid + row) * grid + col];
  }
};

// Ego-frame center of raster cell (row, col).
Vec2 CellCenter(const PerceptionConfig& cfg, int row, int col);

PerceptionBundle ExtractPerception(const Scenario& s,
                                   const PerceptionConfig& cfg = {});

// Raster only. The parallel version splits rows across threads and is
// bit-identical to the serial reference.
std::vector<double> RasterizeBevSerial(const Scenario& s,
                                       const PerceptionConfig& cfg);
std::vector<double> RasterizeBevParallel(const Scenario& s,
                                         const PerceptionConfig& cfg);

std::vector<double> CommandOneHot(Command c);

}  // namespace anchorplan

#endif  // ANCHORPLAN_PERCEPTION_H_
