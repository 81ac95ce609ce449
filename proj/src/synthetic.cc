// Copyright 2026 The cscaffnew Authors. All Rights Reserved.
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
// =============================================================================
#include "cscaffnew/synthetic.h"

#include <algorithm>
#include <cmath>
#include <random>

namespace cscaffnew {

ClientMatrix RandomQuadraticTargets(int d, int n, std::uint64_t seed, double scale) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, scale);
  ClientMatrix targets(d, n);
  for (Eigen::Index k = 0; k < targets.size(); ++k) targets.data()[k] = normal(gen);
  return targets;
}

Dataset SyntheticLogisticData(const LogisticDataOptions& options, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<double> scales(static_cast<std::size_t>(options.dimension));
  for (int j = 0; j < options.dimension; ++j) {
    scales[static_cast<std::size_t>(j)] = std::pow(options.feature_decay, j);
  }
  std::vector<double> planted(static_cast<std::size_t>(options.dimension));
  for (double& w : planted) w = options.weight_scale * normal(gen);

  Dataset data;
  data.max_index = options.dimension;
  data.samples.reserve(static_cast<std::size_t>(options.samples));
  for (int m = 0; m < options.samples; ++m) {
    Sample sample;
    double margin = 0.0;
    for (int j = 0; j < options.dimension; ++j) {
      const double z = normal(gen);
      sample.features.push_back(Feature{j + 1, scales[static_cast<std::size_t>(j)] * z});
      margin += planted[static_cast<std::size_t>(j)] * z;
    }
    double label = unit(gen) < Sigmoid(margin) ? 1.0 : -1.0;
    if (unit(gen) < options.label_noise) label = -label;
    sample.label = label;
    data.samples.push_back(std::move(sample));
  }
  return data;
}

Dataset W8aLikeData(std::uint64_t seed, int samples, bool group_by_label) {
  constexpr int kDimension = 300;
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Zipf-like feature popularity tuned to about 11.6 active features per row.
  std::vector<double> popularity(kDimension);
  for (int j = 0; j < kDimension; ++j) {
    popularity[static_cast<std::size_t>(j)] = std::min(0.6, 0.555 / std::pow(j + 1.0, 0.62));
  }

  // Sparse planted model: a few dozen informative keywords.
  std::vector<double> weights(kDimension, 0.0);
  for (int j = 0; j < kDimension; ++j) {
    if (unit(gen) < 0.15) weights[static_cast<std::size_t>(j)] = 2.0 * normal(gen);
  }
  Dataset data;
  data.max_index = kDimension;
  data.samples.reserve(static_cast<std::size_t>(samples));
  std::vector<double> margins;
  margins.reserve(static_cast<std::size_t>(samples));
  for (int m = 0; m < samples; ++m) {
    Sample sample;
    double margin = 0.0;
    for (int j = 0; j < kDimension; ++j) {
      if (unit(gen) < popularity[static_cast<std::size_t>(j)]) {
        sample.features.push_back(Feature{j + 1, 1.0});
        margin += weights[static_cast<std::size_t>(j)];
      }
    }
    margins.push_back(margin);
    data.samples.push_back(std::move(sample));
  }

  // Bias chosen so that about 3% of labels are positive.
  constexpr double kPositiveRate = 0.03;
  double lo = -50.0;
  double hi = 50.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    double rate = 0.0;
    for (double margin : margins) rate += Sigmoid(margin + mid);
    (rate / static_cast<double>(samples) < kPositiveRate ? lo : hi) = mid;
  }
  const double bias = 0.5 * (lo + hi);
  for (int m = 0; m < samples; ++m) {
    const double margin = margins[static_cast<std::size_t>(m)] + bias;
    data.samples[static_cast<std::size_t>(m)].label = unit(gen) < Sigmoid(margin) ? 1.0 : -1.0;
  }
  if (group_by_label) {
    std::stable_sort(data.samples.begin(), data.samples.end(),
                     [](const Sample& a, const Sample& b) { return a.label < b.label; });
  }
  return data;
}

}  // namespace cscaffnew
