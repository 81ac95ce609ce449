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

#ifndef CSCAFFNEW_ENGINE_H_
#define CSCAFFNEW_ENGINE_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cscaffnew/ledger.h"
#include "cscaffnew/masks.h"
#include "cscaffnew/problems.h"

namespace cscaffnew {

enum class Algorithm {
  kGradientDescent,     // "gd"
  kScaffnew,            // "scaffnew"
  kCompressedScaffnew,  // "compressed_scaffnew"
  kDualForm,            // "alg2": primal-dual form with randomized dual direction
};

std::string_view AlgorithmName(Algorithm algorithm);
Algorithm ParseAlgorithm(std::string_view name);

struct RunConfig {
  Algorithm algorithm = Algorithm::kCompressedScaffnew;
  double gamma = 0.0;  // stepsize, 0 < gamma < 2/L
  double p = 1.0;      // communication probability
  double eta = 1.0;    // control-variate step factor
  int s = 2;           // ones per mask row
  double c = 0.0;      // DownCom weight
  std::int64_t iterations = 0;
  std::uint64_t seed = 0;
  // Dual form only; defaults to p * eta / gamma.
  std::optional<double> tau;

  double DualStep() const { return tau.value_or(p * eta / gamma); }
};

// n(s-1) / (s(n-1)): the largest admissible eta.
double MaxEta(int n, int s);

// Checks the convergence conditions for the chosen algorithm against the
// problem. For gd only gamma matters; scaffnew implies s = n and eta = 1.
// Throws ConfigError naming the violated inequality.
void ValidateRunConfig(const RunConfig& config, const Problem& problem);

struct WorldState {
  std::int64_t t = 0;
  ClientMatrix x;        // x_i as columns
  ClientMatrix h;        // control variates, columns sum to zero
  Vector x_bar_last;     // last broadcast; zero before the first round

  static WorldState Zero(int d, int n);
};

// Dual variables of the primal-dual form; u = -h for the equivalent
// compressed run.
struct DualState {
  ClientMatrix u;
  double tau = 0.0;
  double omega = 0.0;  // (n-1)/(p(s-1)) - 1
  double a = 0.0;      // (n-1)/(p(s-1))
};

// (v_i - mean_j v_j)_i. Idempotent.
ClientMatrix Center(const ClientMatrix& v);

// x_i - gamma * grad_i + gamma * h_i
Vector LocalStep(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& h,
                 const Eigen::Ref<const Vector>& gradient, double gamma);

// (1/s) sum_j q_j .* xhat_j, summed over clients in index order. Reads only
// the masked coordinates. Throws ContractError if a row lacks s ones.
Vector Aggregate(const ClientMatrix& xhat, const RoundMask& mask);

// h_i += (p eta / gamma) * q_i .* (x_bar - xhat_i)
void ControlUpdate(Eigen::Ref<Vector> h, const Eigen::Ref<const Vector>& x_bar,
                   const Eigen::Ref<const Vector>& xhat, const ClientColumn& column, double p,
                   double eta, double gamma);

// d_{i,k} = a (xhat_{i,k} - (1/s) sum_{j in Omega_k} xhat_{j,k}) for i in
// Omega_k, else 0; all zero when no communication happened.
ClientMatrix DualDirection(const ClientMatrix& xhat, const RoundMask& mask, double a,
                           bool communicated);

// Randomness realized in one iteration.
struct RoundDraw {
  bool communicate = false;
  RoundMask mask;  // filled only for masked algorithms on communication rounds
};

// One iteration of each algorithm on an explicit draw. The ledger is
// charged iff the draw communicates.
void StepGradientDescent(WorldState& state, const RunConfig& config, const Problem& problem,
                         CommLedger& ledger);
void StepScaffnew(WorldState& state, const RunConfig& config, const Problem& problem,
                  const RoundDraw& draw, CommLedger& ledger);
void StepCompressed(WorldState& state, const RunConfig& config, const Problem& problem,
                    const RoundDraw& draw, CommLedger& ledger);
void StepDual(WorldState& state, DualState& dual, const RunConfig& config,
              const Problem& problem, const RoundDraw& draw, CommLedger& ledger);

// Drives one run: owns the state, the shared randomness and the ledger.
class Simulator {
 public:
  Simulator(const Problem& problem, RunConfig config);
  Simulator(const Problem& problem, RunConfig config, WorldState initial);

  // Performs iteration t = state().t and returns whether it communicated.
  bool Step();

  const WorldState& state() const { return state_; }
  const CommLedger& ledger() const { return ledger_; }
  const RunConfig& config() const { return config_; }
  const DualState* dual() const { return dual_ ? &*dual_ : nullptr; }

  RoundDraw Draw(std::int64_t t) const;

 private:
  const Problem& problem_;
  RunConfig config_;
  WorldState state_;
  CommLedger ledger_;
  RoundRandomness rng_;
  std::optional<TemplatePattern> pattern_;
  std::optional<DualState> dual_;
};

}  // namespace cscaffnew

#endif  // CSCAFFNEW_ENGINE_H_
