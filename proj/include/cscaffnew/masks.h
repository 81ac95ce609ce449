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

#ifndef CSCAFFNEW_MASKS_H_
#define CSCAFFNEW_MASKS_H_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace cscaffnew {

// Fixed d x n binary pattern with exactly s ones per row. Each round's mask
// is a column permutation of it. Two constructions:
//  - d*s >= n: row k holds a wraparound block of s consecutive columns
//    starting at column s*k mod n (0-based), so columns carry floor(sd/n)
//    or ceil(sd/n) ones;
//  - d*s < n: column j < d*s holds a single one at row j mod d and the
//    remaining columns are empty.
enum class TemplateRule {
  kAuto,    // block rule when d*s >= n, else spread rule
  kBlock,   // requires d*s >= n
  kSpread,  // requires d*s <= n
};

class TemplatePattern {
 public:
  TemplatePattern(int d, int n, int s, TemplateRule rule = TemplateRule::kAuto);

  int rows() const { return d_; }
  int cols() const { return n_; }
  int ones_per_row() const { return s_; }
  bool uses_block_rule() const { return block_rule_; }

  // Sorted 0-based row indices holding a one in 0-based column j.
  const std::vector<int>& column(int j) const { return columns_[static_cast<std::size_t>(j)]; }
  bool bit(int row, int col) const;
  // Largest number of ones in a column, ceil(sd/n).
  int max_column_ones() const { return max_column_ones_; }

  Eigen::MatrixXi Dense() const;

 private:
  int d_;
  int n_;
  int s_;
  bool block_rule_;
  int max_column_ones_ = 0;
  std::vector<std::vector<int>> columns_;
};

// A client's binary mask column q_i, stored as its sorted support.
struct ClientColumn {
  std::vector<int> rows;

  bool operator==(const ClientColumn&) const = default;
  Eigen::VectorXd Dense(int d) const;
};

// Full round mask: one column per client.
struct RoundMask {
  int d = 0;
  int s = 0;
  std::vector<ClientColumn> columns;

  int client_count() const { return static_cast<int>(columns.size()); }
  // Omega_k for every row k: sorted clients with a one in that row.
  std::vector<std::vector<int>> RowSupports() const;
  int MaxColumnOnes() const;
};

// Shared randomness of a run. The coin stream and the permutation stream
// are independent and both are pure functions of (master_seed, t).
class RoundRandomness {
 public:
  explicit RoundRandomness(std::uint64_t master_seed);

  std::uint64_t master_seed() const { return master_seed_; }
  // theta_t: true with probability p.
  bool Coin(std::int64_t t, double p) const;
  // pi_t as a 0-based array: client i receives template column pi_t[i].
  std::vector<int> Permutation(std::int64_t t, int n) const;

 private:
  std::uint64_t master_seed_;
  std::uint64_t coin_key_;
  std::uint64_t permutation_key_;
};

RoundMask MaskFromPermutation(const TemplatePattern& pattern,
                              std::span<const int> permutation);

// Server-side: every client's column for round t. Does not consult the coin.
RoundMask DrawRoundMask(const TemplatePattern& pattern, const RoundRandomness& rng,
                        std::int64_t t);

// Client-side: q_i^t for 0-based client i, regenerated from the shared seed.
// Throws ContractError when theta_t = 0 (no mask exists for that round).
ClientColumn DrawClientColumn(const TemplatePattern& pattern, const RoundRandomness& rng,
                              std::int64_t t, int client, double p);

}  // namespace cscaffnew

#endif  // CSCAFFNEW_MASKS_H_
