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
#include "cscaffnew/enumeration.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>

#include "cscaffnew/engine.h"
#include "cscaffnew/metrics.h"
#include "cscaffnew/rng.h"

namespace cscaffnew {

double EnumerationReport::worst_error() const {
  return std::max({aggregate_route_error, mean_error, variance_error, dual_mean_error,
                   dual_moment_error, dual_sum_error});
}

bool EnumerationReport::Passed(double tolerance) const {
  return rows_uniform && rows_have_s_ones && worst_error() <= tolerance;
}

namespace {

std::int64_t Binomial(int n, int k) {
  std::int64_t result = 1;
  for (int j = 1; j <= k; ++j) result = result * (n - k + j) / j;
  return result;
}

}  // namespace

EnumerationReport EnumerateIdentities(int d, int n, int s, double p, int trials,
                                      std::uint64_t seed) {
  EnumerationReport report;
  report.d = d;
  report.n = n;
  report.s = s;
  report.p = p;

  const TemplatePattern pattern(d, n, s);
  const Eigen::MatrixXi bits = pattern.Dense();
  const double nu = AggregationVarianceFactor(n, s);
  const double a = (n - 1.0) / (p * (s - 1.0));

  std::vector<ClientMatrix> samples;
  CounterStream stream(seed, static_cast<std::uint64_t>(d * 100 + n * 10 + s));
  for (int trial = 0; trial < trials; ++trial) {
    ClientMatrix xhat(d, n);
    for (Eigen::Index k = 0; k < xhat.size(); ++k) xhat.data()[k] = 2.0 * stream.NextUnit() - 1.0;
    samples.push_back(std::move(xhat));
  }

  std::vector<Vector> mean_acc(samples.size(), Vector::Zero(d));
  std::vector<double> variance_acc(samples.size(), 0.0);
  std::vector<ClientMatrix> dual_acc(samples.size(), ClientMatrix::Zero(d, n));
  std::vector<double> dual_moment_acc(samples.size(), 0.0);

  // Per row, how often each support (as a client bitmask) occurs.
  std::vector<std::map<unsigned, std::int64_t>> support_counts(static_cast<std::size_t>(d));
  report.rows_have_s_ones = true;

  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    ++report.permutations;
    const RoundMask mask = MaskFromPermutation(pattern, perm);
    for (int k = 0; k < d; ++k) {
      unsigned support = 0;
      int ones = 0;
      for (int i = 0; i < n; ++i) {
        if (bits(k, perm[static_cast<std::size_t>(i)]) != 0) {
          support |= 1u << i;
          ++ones;
        }
      }
      if (ones != s) report.rows_have_s_ones = false;
      ++support_counts[static_cast<std::size_t>(k)][support];
    }

    for (std::size_t trial = 0; trial < samples.size(); ++trial) {
      const ClientMatrix& xhat = samples[trial];
      const Vector x_bar = Aggregate(xhat, mask);

      // Independent dense route: x_bar_k = (1/s) sum_i bit(k, pi(i)) xhat_{k,i}.
      Vector dense = Vector::Zero(d);
      for (int k = 0; k < d; ++k) {
        for (int i = 0; i < n; ++i) {
          if (bits(k, perm[static_cast<std::size_t>(i)]) != 0) dense[k] += xhat(k, i);
        }
      }
      dense /= s;
      report.aggregate_route_error =
          std::max(report.aggregate_route_error, (dense - x_bar).lpNorm<Eigen::Infinity>());

      const Vector mean = xhat.rowwise().mean();
      mean_acc[trial] += x_bar;
      variance_acc[trial] += n * (x_bar - mean).squaredNorm();

      const ClientMatrix direction = DualDirection(xhat, mask, a, true);
      dual_acc[trial] += direction;
      dual_moment_acc[trial] += direction.squaredNorm();
      report.dual_sum_error =
          std::max(report.dual_sum_error,
                   direction.rowwise().sum().lpNorm<Eigen::Infinity>() / std::max(1.0, a));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  const double count = static_cast<double>(report.permutations);
  for (std::size_t trial = 0; trial < samples.size(); ++trial) {
    const ClientMatrix& xhat = samples[trial];
    const ClientMatrix centered = Center(xhat);
    const double spread = centered.squaredNorm();
    const Vector mean = xhat.rowwise().mean();

    report.mean_error = std::max(report.mean_error,
                                 (mean_acc[trial] / count - mean).lpNorm<Eigen::Infinity>());
    report.variance_error =
        std::max(report.variance_error, std::abs(variance_acc[trial] / count - nu * spread));
    // With probability 1 - p the coin is 0 and d = 0.
    const ClientMatrix dual_mean = p * dual_acc[trial] / count;
    report.dual_mean_error = std::max(report.dual_mean_error,
                                      (dual_mean - centered).lpNorm<Eigen::Infinity>());
    // Relative to the identity's magnitude, which grows with a.
    report.dual_moment_error =
        std::max(report.dual_moment_error,
                 std::abs(p * dual_moment_acc[trial] / count - a * spread) /
                     std::max(1.0, a * spread));
  }

  const std::int64_t expected = report.permutations / Binomial(n, s);
  report.rows_uniform = true;
  for (const auto& counts : support_counts) {
    if (static_cast<std::int64_t>(counts.size()) != Binomial(n, s)) report.rows_uniform = false;
    for (const auto& [support, hits] : counts) {
      if (hits != expected || std::popcount(support) != s) report.rows_uniform = false;
    }
  }
  return report;
}

std::set<std::string> ReachableMasks(const TemplatePattern& pattern) {
  const Eigen::MatrixXi bits = pattern.Dense();
  std::vector<int> perm(static_cast<std::size_t>(pattern.cols()));
  std::iota(perm.begin(), perm.end(), 0);
  std::set<std::string> masks;
  do {
    std::string key;
    for (int k = 0; k < pattern.rows(); ++k) {
      for (int i = 0; i < pattern.cols(); ++i) {
        key.push_back(bits(k, perm[static_cast<std::size_t>(i)]) != 0 ? '1' : '0');
      }
    }
    masks.insert(std::move(key));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return masks;
}

}  // namespace cscaffnew
