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


#include "anchorplan/epdms.h"

#include <cmath>
#include <cstdio>

namespace anchorplan {

namespace {

void CheckUnit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ScoreRangeError(std::string("filter: ") + what + " score " +
                          std::to_string(v) + " outside [0, 1]");
  }
}

}  // namespace

std::string_view SubScoreName(SubScoreId id) {
  switch (id) {
    case SubScoreId::kNC:
      return "NC";
    case SubScoreId::kDAC:
      return "DAC";
    case SubScoreId::kDDC:
      return "DDC";
    case SubScoreId::kTLC:
      return "TL";
    case SubScoreId::kTTC:
      return "TTC";
    case SubScoreId::kEP:
      return "EP";
    case SubScoreId::kHC:
      return "HC";
    case SubScoreId::kLK:
      return "LK";
    case SubScoreId::kEC:
      return "EC";
  }
  return "?";
}

bool IsPenalty(SubScoreId id) {
  for (SubScoreId p : kPenaltyScores) {
    if (p == id) return true;
  }
  return false;
}

double EpdmsConfig::Weight(SubScoreId id) const {
  switch (id) {
    case SubScoreId::kTTC:
      return w_ttc;
    case SubScoreId::kEP:
      return w_ep;
    case SubScoreId::kHC:
      return w_hc;
    case SubScoreId::kLK:
      return w_lk;
    case SubScoreId::kEC:
      return w_ec;
    default:
      throw std::invalid_argument("penalty scores carry no weight");
  }
}

void EpdmsConfig::Validate() const {
  const double values[] = {w_ttc,     w_ep,     w_hc,
                           w_lk,      w_ec,     ttc_threshold,
                           ttc_step,  max_accel, max_jerk,
                           max_lateral_offset, min_expert_progress};
  for (double v : values) {
    if (!(std::isfinite(v) && v > 0.0)) {
      throw std::invalid_argument(
          "epdms config: weights and thresholds must be positive and finite");
    }
  }
}

nlohmann::json ToJson(const EpdmsConfig& c) {
  return {{"weights",
           {{"TTC", c.w_ttc},
            {"EP", c.w_ep},
            {"HC", c.w_hc},
            {"LK", c.w_lk},
            {"EC", c.w_ec}}},
          {"ttc_threshold", c.ttc_threshold},
          {"ttc_step", c.ttc_step},
          {"max_accel", c.max_accel},
          {"max_jerk", c.max_jerk},
          {"max_lateral_offset", c.max_lateral_offset},
          {"min_expert_progress", c.min_expert_progress}};
}

EpdmsConfig EpdmsConfigFromJson(const nlohmann::json& j) {
  EpdmsConfig c;
  if (j.contains("weights")) {
    const auto& w = j.at("weights");
    c.w_ttc = w.value("TTC", c.w_ttc);
    c.w_ep = w.value("EP", c.w_ep);
    c.w_hc = w.value("HC", c.w_hc);
    c.w_lk = w.value("LK", c.w_lk);
    c.w_ec = w.value("EC", c.w_ec);
  }
  c.ttc_threshold = j.value("ttc_threshold", c.ttc_threshold);
  c.ttc_step = j.value("ttc_step", c.ttc_step);
  c.max_accel = j.value("max_accel", c.max_accel);
  c.max_jerk = j.value("max_jerk", c.max_jerk);
  c.max_lateral_offset = j.value("max_lateral_offset", c.max_lateral_offset);
  c.min_expert_progress = j.value("min_expert_progress", c.min_expert_progress);
  c.Validate();
  return c;
}

double Filter(double m_agent, double m_human) {
  CheckUnit(m_agent, "agent");
  CheckUnit(m_human, "human");
  return m_human == 0.0 ? 1.0 : m_agent;
}

double Epdms(const ScoreVector& filtered, const EpdmsConfig& cfg) {
  double penalty = 1.0;
  for (SubScoreId id : kPenaltyScores) penalty *= filtered[int(id)];
  double num = 0.0;
  double den = 0.0;
  for (SubScoreId id : kWeightedScores) {
    num += cfg.Weight(id) * filtered[int(id)];
    den += cfg.Weight(id);
  }
  return penalty * (num / den);
}

double Epdms(const std::map<SubScoreId, double>& filtered,
             const EpdmsConfig& cfg) {
  ScoreVector v{};
  for (int i = 0; i < kNumSubScores; ++i) {
    const auto it = filtered.find(SubScoreId(i));
    if (it == filtered.end()) {
      throw std::invalid_argument("epdms: missing sub-score " +
                                  std::string(SubScoreName(SubScoreId(i))));
    }
    v[i] = it->second;
  }
  return Epdms(v, cfg);
}

EpdmsReport MakeReport(std::string id, const ScoreVector& agent,
                       const ScoreVector& human, const EpdmsConfig& cfg) {
  EpdmsReport r;
  r.scenario_id = std::move(id);
  r.agent = agent;
  r.human = human;
  for (int i = 0; i < kNumSubScores; ++i) r.filtered[i] = Filter(agent[i], human[i]);
  r.epdms = Epdms(r.filtered, cfg);
  return r;
}

EpdmsReport Evaluate(const Trajectory& agent, const Scenario& s,
                     const EpdmsConfig& cfg) {
  return MakeReport(s.id, AllSubScores(agent, s, cfg),
                    AllSubScores(s.expert, s, cfg), cfg);
}

CorpusSummary CorpusEpdms(const std::vector<EpdmsReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("corpus: no reports");
  CorpusSummary out;
  out.count = reports.size();
  for (const EpdmsReport& r : reports) {
    out.epdms += r.epdms;
    for (int i = 0; i < kNumSubScores; ++i) out.mean_filtered[i] += r.filtered[i];
  }
  const double n = static_cast<double>(reports.size());
  out.epdms /= n;
  for (double& v : out.mean_filtered) v /= n;
  return out;
}

std::string FormatScore(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string CsvHeader() {
  std::string h = "id";
  for (SubScoreId id : kColumnOrder) h += "," + std::string(SubScoreName(id));
  return h + ",EPDMS";
}

std::string CsvRow(const EpdmsReport& r) {
  std::string row = r.scenario_id;
  for (SubScoreId id : kColumnOrder) row += "," + FormatScore(r.filtered[int(id)]);
  return row + "," + FormatScore(r.epdms);
}

std::string CsvSummaryRow(const std::string& label, const CorpusSummary& s) {
  std::string row = label;
  for (SubScoreId id : kColumnOrder) {
    row += "," + FormatScore(s.mean_filtered[int(id)]);
  }
  return row + "," + FormatScore(s.epdms);
}

}  // namespace anchorplan
