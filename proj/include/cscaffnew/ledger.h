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

#ifndef CSCAFFNEW_LEDGER_H_
#define CSCAFFNEW_LEDGER_H_

#include <cstdint>

#include "cscaffnew/masks.h"

namespace cscaffnew {

// Real numbers exchanged so far. One unit of UpCom is one real sent in
// parallel by the clients; one unit of DownCom is one broadcast real.
struct CommLedger {
  double c = 0.0;  // DownCom weight in [0, 1]
  std::int64_t upcom = 0;
  std::int64_t downcom = 0;
  std::int64_t rounds = 0;

  double totalcom() const {
    return static_cast<double>(upcom) + c * static_cast<double>(downcom);
  }

  // A masked round: the busiest client sends its column's ones, the server
  // broadcasts all d coordinates.
  void Charge(const RoundMask& mask);
  // An uncompressed round: d reals each way.
  void ChargeFull(int d);
};

}  // namespace cscaffnew

#endif  // CSCAFFNEW_LEDGER_H_
