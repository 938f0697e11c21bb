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

#ifndef ANCHORPLAN_KMEANS_H_
#define ANCHORPLAN_KMEANS_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "anchorplan/trajectory.h"
#include "json.hpp"

namespace anchorplan {

struct KMeansOptions {
  int k = 16;
  uint64_t seed = 0;
  int max_iters = 100;
  double tol = 1e-9;
  // Independent k-means++ initializations; the lowest final inertia wins
  // (ties to the earliest restart).
  int restarts = 4;
};

struct StaticVocabulary {
  std::vector<FlatTrajectory> anchors;
  double inertia = 0.0;
  uint64_t seed = 0;
  int iterations = 0;
  // Inertia after each assignment step of the winning restart.
  std::vector<double> inertia_history;
  std::string corpus_hash;
};

struct Assignment {
  std::vector<int> labels;
  std::vector<double> sq_dist;
};

// Nearest centroid per point by squared Euclidean distance, ties to the
// lowest centroid index.
Assignment AssignSerial(const std::vector<FlatTrajectory>& points,
                        const std::vector<FlatTrajectory>& centroids);
Assignment AssignParallel(const std::vector<FlatTrajectory>& points,
                          const std::vector<FlatTrajectory>& centroids);

// Throws std::invalid_argument if k < 1 or k > points.size().
StaticVocabulary KMeans(const std::vector<FlatTrajectory>& points,
                        const KMeansOptions& opts);

// Sum of squared distances of each point to its cluster mean.
double Wcss(const std::vector<FlatTrajectory>& points,
            const std::vector<int>& labels, int k);

nlohmann::json ToJson(const StaticVocabulary& v);
StaticVocabulary VocabularyFromJson(const nlohmann::json& j);

}  // namespace anchorplan

#endif  // ANCHORPLAN_KMEANS_H_
