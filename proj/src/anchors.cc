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


#include "anchorplan/anchors.h"

#include <string>

namespace anchorplan {

std::string_view AnchorSourceName(AnchorSource s) {
  return s == AnchorSource::kDynamic ? "dynamic" : "static";
}

int AnchorSet::Count(AnchorSource s) const {
  int n = 0;
  for (AnchorSource p : provenance) n += (p == s);
  return n;
}

AnchorSet Fuse(const StaticVocabulary& vocab,
               const std::vector<FlatTrajectory>& dynamic, FuseMode mode,
               int expected_dynamic) {
  const int want = mode == FuseMode::kHybrid ? expected_dynamic : 0;
  if (static_cast<int>(dynamic.size()) != want) {
    throw AnchorCountMismatch("fuse: expected " + std::to_string(want) +
                              " dynamic anchors, got " +
                              std::to_string(dynamic.size()));
  }
  AnchorSet set;
  for (const FlatTrajectory& a : dynamic) {
    set.anchors.push_back(a);
    set.provenance.push_back(AnchorSource::kDynamic);
  }
  for (const FlatTrajectory& a : vocab.anchors) {
    if (!set.anchors.empty() &&
        a.values.size() != set.anchors.front().values.size()) {
      throw HorizonMismatch("fuse: static and dynamic horizons differ");
    }
    set.anchors.push_back(a);
    set.provenance.push_back(AnchorSource::kStatic);
  }
  return set;
}

NearestResult NearestAnchor(const FlatTrajectory& target,
                            const std::vector<FlatTrajectory>& anchors) {
  if (anchors.empty()) throw std::invalid_argument("nearest: empty set");
  NearestResult best;
  for (size_t i = 0; i < anchors.size(); ++i) {
    const double d = Ade(target, anchors[i]);
    if (best.index < 0 || d < best.distance) {
      best.index = static_cast<int>(i);
      best.distance = d;
    }
  }
  return best;
}

NearestResult NearestAnchor(const FlatTrajectory& target, const AnchorSet& set) {
  return NearestAnchor(target, set.anchors);
}

}  // namespace anchorplan
