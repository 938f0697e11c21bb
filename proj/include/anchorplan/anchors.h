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


#ifndef ANCHORPLAN_ANCHORS_H_
#define ANCHORPLAN_ANCHORS_H_

#include <stdexcept>
#include <string_view>
#include <vector>

#include "anchorplan/kmeans.h"
#include "anchorplan/trajectory.h"

namespace anchorplan {

inline constexpr int kDefaultStaticAnchors = 16;
inline constexpr int kDefaultDynamicAnchors = 4;

enum class AnchorSource { kDynamic, kStatic };

std::string_view AnchorSourceName(AnchorSource s);

class AnchorCountMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Hybrid anchor set: dynamic anchors first, then static, in input order.
struct AnchorSet {
  std::vector<FlatTrajectory> anchors;
  std::vector<AnchorSource> provenance;

  size_t size() const { return anchors.size(); }
  bool empty() const { return anchors.empty(); }
  int Count(AnchorSource s) const;
};

enum class FuseMode {
  kHybrid,      // exactly `expected_dynamic` dynamic anchors
  kStaticOnly,  // ablation: dynamic must be empty
};

// Throws AnchorCountMismatch when the dynamic count does not fit the mode.
AnchorSet Fuse(const StaticVocabulary& vocab,
               const std::vector<FlatTrajectory>& dynamic,
               FuseMode mode = FuseMode::kHybrid,
               int expected_dynamic = kDefaultDynamicAnchors);

struct NearestResult {
  int index = -1;
  double distance = 0.0;
};

// Argmin of ade over the set, ties to the lowest index. Throws
// std::invalid_argument on an empty set.
NearestResult NearestAnchor(const FlatTrajectory& target,
                            const std::vector<FlatTrajectory>& anchors);
NearestResult NearestAnchor(const FlatTrajectory& target, const AnchorSet& set);

}  // namespace anchorplan

#endif  // ANCHORPLAN_ANCHORS_H_
