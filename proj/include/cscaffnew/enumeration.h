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

#ifndef CSCAFFNEW_ENUMERATION_H_
#define CSCAFFNEW_ENUMERATION_H_

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "cscaffnew/masks.h"

namespace cscaffnew {

// Exact expectations over all n! column permutations of the template,
// checked against the closed forms:
//   E[x_bar] = mean(xhat)
//   n sum_k E(x_bar_k - mean_k)^2 = nu ||W xhat||^2,   nu = (n-s)/(s(n-1))
//   E[d] = W xhat
//   E sum_i ||d_i||^2 = (n-1)/(p(s-1)) ||W xhat||^2
//   sum_i d_i = 0 for every draw
// where the expectations over d include the Bernoulli(p) coin.
struct EnumerationReport {
  int d = 0;
  int n = 0;
  int s = 0;
  double p = 1.0;
  std::int64_t permutations = 0;
  bool rows_uniform = false;
  bool rows_have_s_ones = false;
  double aggregate_route_error = 0.0;  // sparse Aggregate vs dense template
  double mean_error = 0.0;
  double variance_error = 0.0;
  double dual_mean_error = 0.0;
  double dual_moment_error = 0.0;  // relative to max(1, a * spread)
  double dual_sum_error = 0.0;     // relative to max(1, a)

  double worst_error() const;
  bool Passed(double tolerance) const;
};

EnumerationReport EnumerateIdentities(int d, int n, int s, double p, int trials,
                                      std::uint64_t seed);

// Every distinct d x n mask reachable by permuting the template's columns,
// each serialized row-major as '0'/'1' characters.
std::set<std::string> ReachableMasks(const TemplatePattern& pattern);

}  // namespace cscaffnew

#endif  // CSCAFFNEW_ENUMERATION_H_
