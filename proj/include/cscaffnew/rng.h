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

#ifndef CSCAFFNEW_RNG_H_
#define CSCAFFNEW_RNG_H_

#include <cstdint>

namespace cscaffnew {

// SplitMix64 finalizer: a bijective 64-bit mixer.
std::uint64_t Mix64(std::uint64_t z);

// Stateless, counter-based stream: draw j of this stream is a pure function
// of (key, j), so any round can be regenerated without replaying history.
class CounterStream {
 public:
  CounterStream(std::uint64_t key, std::uint64_t counter_base)
      : key_(Mix64(key ^ Mix64(counter_base + 0x632be59bd9b4e019ULL))) {}

  std::uint64_t NextU64();
  // Uniform in [0, 1) with 53 random bits.
  double NextUnit();
  // Uniform integer in [0, bound), bound >= 1; unbiased (Lemire rejection).
  std::uint64_t NextBelow(std::uint64_t bound);

 private:
  std::uint64_t key_;
  std::uint64_t next_ = 0;
};

// Key of an independent named stream derived from a master seed.
std::uint64_t DeriveStreamKey(std::uint64_t master_seed, std::uint64_t stream_id);

}  // namespace cscaffnew

#endif  // CSCAFFNEW_RNG_H_
