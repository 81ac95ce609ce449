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
#include "cscaffnew/masks.h"

#include <algorithm>
#include <numeric>
#include <string>

#include "cscaffnew/errors.h"
#include "cscaffnew/rng.h"

namespace cscaffnew {

namespace {

constexpr std::uint64_t kCoinStream = 1;
constexpr std::uint64_t kPermutationStream = 2;

}  // namespace

TemplatePattern::TemplatePattern(int d, int n, int s, TemplateRule rule)
    : d_(d), n_(n), s_(s) {
  if (d < 1) throw ConfigError("template: d must be >= 1");
  if (n < 2) throw ConfigError("template: n must be >= 2");
  if (s < 2 || s > n) {
    throw ConfigError("template: s must satisfy 2 <= s <= n (got s=" + std::to_string(s) +
                      ", n=" + std::to_string(n) + ")");
  }
  const long long ds = static_cast<long long>(d) * s;
  switch (rule) {
    case TemplateRule::kAuto:
      block_rule_ = ds >= n;
      break;
    case TemplateRule::kBlock:
      if (ds < n) throw ConfigError("template: block rule needs d*s >= n");
      block_rule_ = true;
      break;
    case TemplateRule::kSpread:
      if (ds > n) throw ConfigError("template: spread rule needs d*s <= n");
      block_rule_ = false;
      break;
  }
  columns_.resize(static_cast<std::size_t>(n));
  if (block_rule_) {
    for (int k = 0; k < d; ++k) {
      const long long start = (static_cast<long long>(s) * k) % n;
      for (int offset = 0; offset < s; ++offset) {
        columns_[static_cast<std::size_t>((start + offset) % n)].push_back(k);
      }
    }
  } else {
    for (int j = 0; j < d * s; ++j) columns_[static_cast<std::size_t>(j)].push_back(j % d);
  }
  for (const auto& col : columns_) {
    max_column_ones_ = std::max(max_column_ones_, static_cast<int>(col.size()));
  }
}

bool TemplatePattern::bit(int row, int col) const {
  const auto& rows = column(col);
  return std::binary_search(rows.begin(), rows.end(), row);
}

Eigen::MatrixXi TemplatePattern::Dense() const {
  Eigen::MatrixXi bits = Eigen::MatrixXi::Zero(d_, n_);
  for (int j = 0; j < n_; ++j) {
    for (int k : column(j)) bits(k, j) = 1;
  }
  return bits;
}

Eigen::VectorXd ClientColumn::Dense(int d) const {
  Eigen::VectorXd q = Eigen::VectorXd::Zero(d);
  for (int k : rows) q[k] = 1.0;
  return q;
}

std::vector<std::vector<int>> RoundMask::RowSupports() const {
  std::vector<std::vector<int>> supports(static_cast<std::size_t>(d));
  for (int i = 0; i < client_count(); ++i) {
    for (int k : columns[static_cast<std::size_t>(i)].rows) {
      supports[static_cast<std::size_t>(k)].push_back(i);
    }
  }
  return supports;
}

int RoundMask::MaxColumnOnes() const {
  std::size_t most = 0;
  for (const auto& col : columns) most = std::max(most, col.rows.size());
  return static_cast<int>(most);
}

RoundRandomness::RoundRandomness(std::uint64_t master_seed)
    : master_seed_(master_seed),
      coin_key_(DeriveStreamKey(master_seed, kCoinStream)),
      permutation_key_(DeriveStreamKey(master_seed, kPermutationStream)) {}

bool RoundRandomness::Coin(std::int64_t t, double p) const {
  CounterStream stream(coin_key_, static_cast<std::uint64_t>(t));
  return stream.NextUnit() < p;
}

std::vector<int> RoundRandomness::Permutation(std::int64_t t, int n) const {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  CounterStream stream(permutation_key_, static_cast<std::uint64_t>(t));
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(stream.NextBelow(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  return perm;
}

RoundMask MaskFromPermutation(const TemplatePattern& pattern,
                              std::span<const int> permutation) {
  if (static_cast<int>(permutation.size()) != pattern.cols()) {
    throw ContractError("permutation length differs from the client count");
  }
  RoundMask mask;
  mask.d = pattern.rows();
  mask.s = pattern.ones_per_row();
  mask.columns.reserve(permutation.size());
  for (int source : permutation) mask.columns.push_back(ClientColumn{pattern.column(source)});
  return mask;
}

RoundMask DrawRoundMask(const TemplatePattern& pattern, const RoundRandomness& rng,
                        std::int64_t t) {
  const std::vector<int> perm = rng.Permutation(t, pattern.cols());
  return MaskFromPermutation(pattern, perm);
}

ClientColumn DrawClientColumn(const TemplatePattern& pattern, const RoundRandomness& rng,
                              std::int64_t t, int client, double p) {
  if (client < 0 || client >= pattern.cols()) {
    throw ContractError("client index out of range");
  }
  if (!rng.Coin(t, p)) {
    throw ContractError("round " + std::to_string(t) + " has no communication, so no mask");
  }
  const std::vector<int> perm = rng.Permutation(t, pattern.cols());
  return ClientColumn{pattern.column(perm[static_cast<std::size_t>(client)])};
}

}  // namespace cscaffnew
