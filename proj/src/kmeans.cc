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

#include "anchorplan/kmeans.h"

#include <cmath>
#include <limits>

#include "anchorplan/rng.h"

namespace anchorplan {

namespace {

double SquaredDistance(const FlatTrajectory& a, const FlatTrajectory& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    s += d * d;
  }
  return s;
}

void AssignOne(const std::vector<FlatTrajectory>& points,
               const std::vector<FlatTrajectory>& centroids, size_t i,
               Assignment& out) {
  double best = std::numeric_limits<double>::infinity();
  int label = 0;
  for (size_t c = 0; c < centroids.size(); ++c) {
    const double d = SquaredDistance(points[i], centroids[c]);
    if (d < best) {
      best = d;
      label = static_cast<int>(c);
    }
  }
  out.labels[i] = label;
  out.sq_dist[i] = best;
}

std::vector<FlatTrajectory> SeedPlusPlus(
    const std::vector<FlatTrajectory>& points, int k, Rng& rng) {
  std::vector<FlatTrajectory> centroids;
  centroids.push_back(points[rng.UniformInt(points.size())]);
  std::vector<double> d2(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    d2[i] = SquaredDistance(points[i], centroids[0]);
  }
  while (static_cast<int>(centroids.size()) < k) {
    double total = 0.0;
    for (double d : d2) total += d;
    size_t pick = 0;
    if (total > 0.0) {
      const double target = rng.Uniform() * total;
      double acc = 0.0;
      pick = points.size() - 1;
      for (size_t i = 0; i < points.size(); ++i) {
        acc += d2[i];
        if (acc > target && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.UniformInt(points.size());
    }
    centroids.push_back(points[pick]);
    for (size_t i = 0; i < points.size(); ++i) {
      d2[i] = std::min(d2[i], SquaredDistance(points[i], centroids.back()));
    }
  }
  return centroids;
}

StaticVocabulary RunLloyd(const std::vector<FlatTrajectory>& points,
                          const KMeansOptions& opts, uint64_t seed) {
  Rng rng(seed);
  std::vector<FlatTrajectory> centroids = SeedPlusPlus(points, opts.k, rng);
  const size_t dim = points[0].values.size();
  StaticVocabulary vocab;
  Assignment assign;
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    assign = AssignParallel(points, centroids);
    double inertia = 0.0;
    for (double d : assign.sq_dist) inertia += d;
    vocab.inertia_history.push_back(inertia);
    vocab.iterations = iter + 1;

    std::vector<FlatTrajectory> next(opts.k, FlatTrajectory(std::vector<double>(dim, 0.0)));
    std::vector<int> counts(opts.k, 0);
    for (size_t i = 0; i < points.size(); ++i) {
      const int c = assign.labels[i];
      ++counts[c];
      for (size_t j = 0; j < dim; ++j) next[c].values[j] += points[i].values[j];
    }
    std::vector<bool> taken(points.size(), false);
    for (int c = 0; c < opts.k; ++c) {
      if (counts[c] > 0) {
        for (double& v : next[c].values) v /= counts[c];
        continue;
      }
      // Empty cluster: move it onto the point farthest from its centroid.
      size_t far = 0;
      double far_d = -1.0;
      for (size_t i = 0; i < points.size(); ++i) {
        if (!taken[i] && assign.sq_dist[i] > far_d) {
          far_d = assign.sq_dist[i];
          far = i;
        }
      }
      taken[far] = true;
      next[c] = points[far];
    }
    double shift = 0.0;
    for (int c = 0; c < opts.k; ++c) {
      shift = std::max(shift, std::sqrt(SquaredDistance(next[c], centroids[c])));
    }
    centroids = std::move(next);
    if (shift < opts.tol) break;
  }
  assign = AssignParallel(points, centroids);
  double inertia = 0.0;
  for (double d : assign.sq_dist) inertia += d;
  vocab.inertia_history.push_back(inertia);
  vocab.inertia = inertia;
  vocab.anchors = std::move(centroids);
  return vocab;
}

}  // namespace

Assignment AssignSerial(const std::vector<FlatTrajectory>& points,
                        const std::vector<FlatTrajectory>& centroids) {
  Assignment out{std::vector<int>(points.size()),
                 std::vector<double>(points.size())};
  for (size_t i = 0; i < points.size(); ++i) {
    AssignOne(points, centroids, i, out);
  }
  return out;
}

Assignment AssignParallel(const std::vector<FlatTrajectory>& points,
                          const std::vector<FlatTrajectory>& centroids) {
  Assignment out{std::vector<int>(points.size()),
                 std::vector<double>(points.size())};
  const long n = static_cast<long>(points.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) AssignOne(points, centroids, size_t(i), out);
  return out;
}

StaticVocabulary KMeans(const std::vector<FlatTrajectory>& points,
                        const KMeansOptions& opts) {
  if (opts.k < 1) throw std::invalid_argument("kmeans: K must be >= 1");
  if (static_cast<size_t>(opts.k) > points.size()) {
    throw std::invalid_argument("kmeans: K exceeds the number of points");
  }
  StaticVocabulary best;
  bool have = false;
  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    StaticVocabulary v = RunLloyd(points, opts, MixSeed(opts.seed, r));
    if (!have || v.inertia < best.inertia) {
      best = std::move(v);
      have = true;
    }
  }
  best.seed = opts.seed;
  return best;
}

double Wcss(const std::vector<FlatTrajectory>& points,
            const std::vector<int>& labels, int k) {
  const size_t dim = points.empty() ? 0 : points[0].values.size();
  std::vector<std::vector<double>> mean(k, std::vector<double>(dim, 0.0));
  std::vector<int> counts(k, 0);
  for (size_t i = 0; i < points.size(); ++i) {
    ++counts[labels[i]];
    for (size_t j = 0; j < dim; ++j) mean[labels[i]][j] += points[i].values[j];
  }
  for (int c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    for (double& v : mean[c]) v /= counts[c];
  }
  double total = 0.0;
  for (size_t i = 0; i < points.size(); ++i) {
    for (size_t j = 0; j < dim; ++j) {
      const double d = points[i].values[j] - mean[labels[i]][j];
      total += d * d;
    }
  }
  return total;
}

nlohmann::json ToJson(const StaticVocabulary& v) {
  nlohmann::json anchors = nlohmann::json::array();
  for (const FlatTrajectory& a : v.anchors) anchors.push_back(a.values);
  return {{"K", v.anchors.size()},
          {"seed", v.seed},
          {"inertia", v.inertia},
          {"iterations", v.iterations},
          {"corpus_hash", v.corpus_hash},
          {"horizon", v.anchors.empty() ? 0 : v.anchors[0].horizon()},
          {"anchors", anchors}};
}

StaticVocabulary VocabularyFromJson(const nlohmann::json& j) {
  StaticVocabulary v;
  v.seed = j.at("seed").get<uint64_t>();
  v.inertia = j.at("inertia").get<double>();
  v.iterations = j.value("iterations", 0);
  v.corpus_hash = j.value("corpus_hash", std::string());
  for (const auto& a : j.at("anchors")) {
    v.anchors.emplace_back(a.get<std::vector<double>>());
  }
  if (j.at("K").get<size_t>() != v.anchors.size()) {
    throw std::invalid_argument("vocabulary: K does not match anchor count");
  }
  return v;
}

}  // namespace anchorplan
