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

#ifndef CSCAFFNEW_DATAIO_H_
#define CSCAFFNEW_DATAIO_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace cscaffnew {

// One (index, value) pair of a sparse feature vector. Indices are 1-based,
// as in the LIBSVM text format.
struct Feature {
  std::int32_t index;
  double value;

  bool operator==(const Feature&) const = default;
};

struct Sample {
  std::vector<Feature> features;  // strictly increasing indices
  double label;                   // -1 or +1

  bool operator==(const Sample&) const = default;
};

struct Dataset {
  std::vector<Sample> samples;
  std::int32_t max_index = 0;  // d_raw: largest feature index seen

  std::size_t size() const { return samples.size(); }
  bool operator==(const Dataset&) const = default;
};

struct ShardedDataset {
  std::vector<Dataset> shards;  // all of equal size, file order preserved
  std::size_t discarded = 0;    // tail samples dropped (M mod n)
  std::int32_t dimension = 0;   // shared model dimension, d_raw of the source

  std::size_t client_count() const { return shards.size(); }
  std::size_t shard_size() const {
    return shards.empty() ? 0 : shards.front().size();
  }
};

// Parses LIBSVM text. Nonpositive labels map to -1 and positive ones to +1.
// Blank lines are skipped; `\r\n` endings are accepted. Throws ParseError
// carrying the 1-based line number on malformed input.
Dataset ParseLibsvm(std::string_view text);
Dataset ParseLibsvm(std::istream& in);
Dataset ReadLibsvmFile(const std::string& path);

// Inverse of ParseLibsvm up to value formatting; labels are written as +1/-1
// and values with round-trip precision.
std::string FormatLibsvm(const Dataset& dataset);

// Splits the first n*floor(M/n) samples into n contiguous blocks.
ShardedDataset Shard(const Dataset& dataset, std::size_t n);

}  // namespace cscaffnew

#endif  // CSCAFFNEW_DATAIO_H_
