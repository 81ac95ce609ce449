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

#ifndef CSCAFFNEW_SYNTHETIC_H_
#define CSCAFFNEW_SYNTHETIC_H_

#include <cstdint>

#include "cscaffnew/dataio.h"
#include "cscaffnew/problems.h"

namespace cscaffnew {

// d x n targets with i.i.d. N(0, scale^2) entries.
ClientMatrix RandomQuadraticTargets(int d, int n, std::uint64_t seed, double scale = 1.0);

struct LogisticDataOptions {
  int samples = 600;
  int dimension = 10;
  // Feature j is scaled by decay^j, so the Hessian is ill-conditioned when
  // decay < 1.
  double feature_decay = 1.0;
  // Probability that a label is flipped; > 0 keeps the data non-separable.
  double label_noise = 0.1;
  double weight_scale = 1.0;
};

// Dense Gaussian features with labels from a planted logistic model.
Dataset SyntheticLogisticData(const LogisticDataOptions& options, std::uint64_t seed);

// Stand-in with the shape of the LIBSVM w8a set: 49749 samples, 300 binary
// features, about 11.6 nonzeros per row and roughly 3% positive labels.
// With group_by_label the negatives come first, so contiguous shards are
// heterogeneous.
Dataset W8aLikeData(std::uint64_t seed, int samples = 49749, bool group_by_label = true);

}  // namespace cscaffnew

#endif  // CSCAFFNEW_SYNTHETIC_H_
