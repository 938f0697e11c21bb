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


#ifndef ANCHORPLAN_EPDMS_H_
#define ANCHORPLAN_EPDMS_H_

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "anchorplan/scenario.h"
#include "json.hpp"

namespace anchorplan {

enum class SubScoreId : int {
  kNC = 0,
  kDAC,
  kDDC,
  kTLC,
  kTTC,
  kEP,
  kHC,
  kLK,
  kEC,
};
inline constexpr int kNumSubScores = 9;

inline constexpr std::array<SubScoreId, 4> kPenaltyScores = {
    SubScoreId::kNC, SubScoreId::kDAC, SubScoreId::kDDC, SubScoreId::kTLC};
inline constexpr std::array<SubScoreId, 5> kWeightedScores = {
    SubScoreId::kTTC, SubScoreId::kEP, SubScoreId::kHC, SubScoreId::kLK,
    SubScoreId::kEC};
// Report column order.
inline constexpr std::array<SubScoreId, 9> kColumnOrder = {
    SubScoreId::kNC,  SubScoreId::kDAC, SubScoreId::kDDC,
    SubScoreId::kTLC, SubScoreId::kEP,  SubScoreId::kTTC,
    SubScoreId::kLK,  SubScoreId::kHC,  SubScoreId::kEC};

std::string_view SubScoreName(SubScoreId id);
bool IsPenalty(SubScoreId id);

class ScoreRangeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct EpdmsConfig {
  // Weights of the averaged scores, indexed like kWeightedScores.
  double w_ttc = 5.0;
  double w_ep = 5.0;
  double w_hc = 2.0;
  double w_lk = 2.0;
  double w_ec = 2.0;
  double ttc_threshold = 1.0;  // s
  double ttc_step = 0.1;       // s, look-ahead sampling
  double max_accel = 4.0;      // m/s^2
  double max_jerk = 8.0;       // m/s^3
  double max_lateral_offset = 0.75;  // m
  double min_expert_progress = 1.0;  // m; below this EP is 1

  double Weight(SubScoreId id) const;
  // Throws std::invalid_argument on non-positive or non-finite values.
  void Validate() const;
};

nlohmann::json ToJson(const EpdmsConfig& c);
EpdmsConfig EpdmsConfigFromJson(const nlohmann::json& j);

using ScoreVector = std::array<double, kNumSubScores>;

struct EpdmsReport {
  std::string scenario_id;
  ScoreVector agent{};
  ScoreVector human{};
  ScoreVector filtered{};
  double epdms = 0.0;
};

// 1 when the human score is 0, else the agent score. Throws ScoreRangeError
// if either input is outside [0, 1].
double Filter(double m_agent, double m_human);

// Product of filtered penalty scores times the weighted mean of filtered
// averaged scores.
double Epdms(const ScoreVector& filtered, const EpdmsConfig& cfg);
// From a map keyed by sub-score; throws std::invalid_argument on a missing
// entry.
double Epdms(const std::map<SubScoreId, double>& filtered,
             const EpdmsConfig& cfg);

// Rule-based sub-score of an ego-frame trajectory on `s`. The expert plan in
// `s` is the progress reference. Throws HorizonMismatch if horizons differ.
double SubScore(SubScoreId id, const Trajectory& t, const Scenario& s,
                const EpdmsConfig& cfg);
ScoreVector AllSubScores(const Trajectory& t, const Scenario& s,
                         const EpdmsConfig& cfg);

// Scores `agent` against the scenario's expert as the human reference.
EpdmsReport Evaluate(const Trajectory& agent, const Scenario& s,
                     const EpdmsConfig& cfg);
EpdmsReport MakeReport(std::string id, const ScoreVector& agent,
                       const ScoreVector& human, const EpdmsConfig& cfg);

// Building blocks, exposed for tests.
// Velocity samples: start velocity at t = 0, then segment averages at
// (i - 1/2) dt. Returns (time, velocity) pairs.
std::vector<std::pair<double, Vec2>> VelocitySamples(const Trajectory& t,
                                                     double start_speed);
// Acceleration at midpoints of consecutive velocity samples.
std::vector<std::pair<double, Vec2>> Accelerations(const Trajectory& t,
                                                   double start_speed);
// Jerk magnitudes within the plan (waypoint velocities only, no start state).
std::vector<double> JerkMagnitudes(const Trajectory& t);
// Signed route progress of the final waypoint (world frame).
double RouteProgress(const Trajectory& t, const Scenario& s);
// True when the path start -> waypoints crosses the red stop line segment.
bool CrossesRedLight(const Trajectory& t, const Scenario& s);

struct CorpusSummary {
  double epdms = 0.0;
  ScoreVector mean_filtered{};
  size_t count = 0;
};

// Arithmetic means over reports. Throws std::invalid_argument when empty.
CorpusSummary CorpusEpdms(const std::vector<EpdmsReport>& reports);

// CSV header: id,NC,DAC,DDC,TL,EP,TTC,LK,HC,EC,EPDMS
std::string CsvHeader();
std::string CsvRow(const EpdmsReport& r);
std::string CsvSummaryRow(const std::string& label, const CorpusSummary& s);
std::string FormatScore(double v);

}  // namespace anchorplan

#endif  // ANCHORPLAN_EPDMS_H_
