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
#include "cscaffnew/metrics.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cscaffnew/errors.h"
#include "cscaffnew/ledger.h"
#include "cscaffnew/synthetic.h"
#include "cscaffnew/tuning.h"

namespace cscaffnew {
namespace {

QuadraticProblem TwoPointQuadratic() {
  return QuadraticProblem(
      std::vector<Vector>{Vector::Constant(1, 0.0), Vector::Constant(1, 2.0)});
}

LogisticProblem HandMadeLogistic() {
  return LogisticProblem(Shard(ParseLibsvm("+1 1:1 2:0.5\n"
                                           "-1 1:-0.3 2:1\n"
                                           "+1 1:0.2 2:-1\n"
                                           "-1 1:1 2:1\n"),
                               2),
                         0.1);
}

TEST(ReferenceSolve, QuadraticClosedForm) {
  const QuadraticProblem problem = TwoPointQuadratic();
  for (const ReferenceSolution& ref : {ReferenceSolve(problem), ExactReference(problem)}) {
    EXPECT_NEAR(ref.x[0], 1.0, 1e-12);
    EXPECT_NEAR(ref.h(0, 0), 1.0, 1e-12);
    EXPECT_NEAR(ref.h(0, 1), -1.0, 1e-12);
    EXPECT_NEAR(ref.f, 0.5, 1e-12);
    EXPECT_LE(ref.residual, 1e-12);
  }
}

TEST(ReferenceSolve, HomogeneousQuadratic) {
  Vector b(2);
  b << 3.0, -1.0;
  const QuadraticProblem problem(std::vector<Vector>{b, b, b});
  const ReferenceSolution ref = ExactReference(problem);
  EXPECT_EQ(ref.x, b);
  EXPECT_EQ(ref.f, 0.0);
}

TEST(ReferenceSolve, TwoStartConsistency) {
  const LogisticProblem problem = HandMadeLogistic();
  const ReferenceSolution a = ReferenceSolve(problem);
  ReferenceOptions options;
  options.start = (Vector(2) << 5.0, -7.0).finished();
  const ReferenceSolution b = ReferenceSolve(problem, options);
  EXPECT_LE((a.x - b.x).norm(), 1e-10);
  EXPECT_LE(a.residual, 1e-12);
  EXPECT_LE(a.h.rowwise().sum().norm(), 1e-7);
  EXPECT_NEAR(a.f, problem.Objective(a.x), 0.0);
}

TEST(ReferenceSolve, ReportsResidualOnBudgetExhaustion) {
  ReferenceOptions options;
  options.max_iterations = 3;
  try {
    ReferenceSolve(HandMadeLogistic(), options);
    FAIL();
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.residual(), 1e-12);
    EXPECT_NE(std::string(e.what()).find("final residual"), std::string::npos);
  }
}

TEST(Lyapunov, ZeroAtOptimum) {
  const QuadraticProblem problem(RandomQuadraticTargets(3, 4, 2));
  const ReferenceSolution ref = ExactReference(problem);
  WorldState state = WorldState::Zero(3, 4);
  state.x.colwise() = ref.x;
  state.h = ref.h;
  EXPECT_EQ(Lyapunov(state, ref, 0.7, 0.4, 0.5, 4, 2), 0.0);
}

TEST(Lyapunov, SingleDisplacedClient) {
  const QuadraticProblem problem = TwoPointQuadratic();
  const ReferenceSolution ref = ExactReference(problem);
  WorldState state = WorldState::Zero(1, 2);
  state.x(0, 0) = ref.x[0] + 1.0;
  state.x(0, 1) = ref.x[0];
  state.h = ref.h;
  EXPECT_DOUBLE_EQ(Lyapunov(state, ref, 1.0, 1.0, 1.0, 2, 2), 1.0);
}

TEST(Lyapunov, ControlTermScalesQuadratically) {
  const QuadraticProblem problem(RandomQuadraticTargets(3, 5, 4));
  const ReferenceSolution ref = ExactReference(problem);
  WorldState state = WorldState::Zero(3, 5);
  state.x = RandomQuadraticTargets(3, 5, 9);
  WorldState doubled = state;
  state.h = ref.h + Center(RandomQuadraticTargets(3, 5, 10));
  doubled.h = ref.h + 2.0 * (state.h - ref.h);
  WorldState at_h_star = state;
  at_h_star.h = ref.h;
  const double x_term = Lyapunov(at_h_star, ref, 0.8, 0.3, 0.6, 5, 3);
  const double h_term = Lyapunov(state, ref, 0.8, 0.3, 0.6, 5, 3) - x_term;
  EXPECT_NEAR(Lyapunov(doubled, ref, 0.8, 0.3, 0.6, 5, 3) - x_term, 4.0 * h_term,
              1e-12 * h_term);
  EXPECT_NEAR(h_term, 0.8 / (0.09 * 0.6) * 2.0 * (state.h - ref.h).squaredNorm(),
              1e-12 * h_term);
}

TEST(ObjectiveGap, Examples) {
  const QuadraticProblem problem = TwoPointQuadratic();
  const ReferenceSolution ref = ExactReference(problem);
  EXPECT_EQ(ObjectiveGap(problem, ref.x, ref), 0.0);
  EXPECT_DOUBLE_EQ(ObjectiveGap(problem, Vector::Zero(1), ref), 0.5);
}

TEST(ObjectiveGap, BoundedBySmoothness) {
  LogisticDataOptions options;
  options.samples = 120;
  options.dimension = 6;
  const LogisticProblem problem(Shard(SyntheticLogisticData(options, 4), 4), 0.01);
  const ReferenceSolution ref = ReferenceSolve(problem);
  std::mt19937_64 gen(1);
  std::normal_distribution<double> normal(0.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    Vector x = ref.x;
    for (int k = 0; k < 6; ++k) x[k] += normal(gen);
    const double gap = ObjectiveGap(problem, x, ref);
    EXPECT_GE(gap, -1e-12);
    EXPECT_LE(gap, 0.5 * problem.smoothness() * (x - ref.x).squaredNorm() + 1e-12);
  }
}

TEST(ObjectiveGap, NonincreasingForGradientDescent) {
  LogisticDataOptions options;
  options.samples = 90;
  options.dimension = 5;
  const LogisticProblem problem(Shard(SyntheticLogisticData(options, 6), 3), 0.02);
  const ReferenceSolution ref = ReferenceSolve(problem);
  RunConfig config;
  config.algorithm = Algorithm::kGradientDescent;
  config.gamma = 1.0 / problem.smoothness();
  Simulator sim(problem, config);
  double previous = ObjectiveGap(problem, sim.state().x.col(0), ref);
  for (int t = 0; t < 300; ++t) {
    sim.Step();
    const double gap = ObjectiveGap(problem, sim.state().x_bar_last, ref);
    EXPECT_LE(gap, previous + 1e-15);
    previous = gap;
  }
}

TEST(CommLedger, ChargeExample) {
  const TemplatePattern pattern(300, 3000, 10);
  CommLedger ledger;
  ledger.c = 0.2;
  ledger.Charge(DrawRoundMask(pattern, RoundRandomness(1), 0));
  EXPECT_EQ(ledger.upcom, 1);
  EXPECT_EQ(ledger.downcom, 300);
  EXPECT_DOUBLE_EQ(ledger.totalcom(), 61.0);
  EXPECT_EQ(ledger.rounds, 1);
}

TEST(CommLedger, FullParticipationAndZeroWeight) {
  const TemplatePattern pattern(7, 4, 4);
  CommLedger ledger;
  ledger.Charge(DrawRoundMask(pattern, RoundRandomness(1), 0));
  EXPECT_EQ(ledger.upcom, 7);
  EXPECT_EQ(ledger.totalcom(), static_cast<double>(ledger.upcom));
}

TEST(CommLedger, Linearity) {
  for (int n : {4, 9, 30}) {
    for (int d : {1, 5, 40}) {
      for (int s = 2; s <= n; s += 3) {
        const TemplatePattern pattern(d, n, s);
        const RoundRandomness rng(static_cast<std::uint64_t>(n * d + s));
        CommLedger ledger;
        ledger.c = 0.3;
        for (std::int64_t t = 0; t < 25; ++t) ledger.Charge(DrawRoundMask(pattern, rng, t));
        const int per_round = (s * d + n - 1) / n;
        EXPECT_EQ(ledger.upcom, 25 * per_round);
        EXPECT_DOUBLE_EQ(ledger.totalcom(), 25 * (per_round + 0.3 * d));
      }
    }
  }
}

TEST(ErgodicState, ConstantSequence) {
  ErgodicState ergodic(2, 3);
  ClientMatrix z(2, 3);
  z << 1, 2, 3, 4, 5, 6;
  for (int t = 0; t < 7; ++t) ergodic.Add(z);
  EXPECT_EQ(ergodic.horizon(), 6);
  EXPECT_LE((ergodic.ClientAverages() - z).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((ergodic.Average() - z.rowwise().mean()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(ErgodicState(2, 3).Average(), ContractError);
}

TEST(ErgodicGradMetric, ConstantIterates) {
  const QuadraticProblem problem(RandomQuadraticTargets(3, 4, 7));
  const Vector x_star = problem.Minimizer();
  ErgodicState at_optimum(3, 4);
  ClientMatrix stacked(3, 4);
  stacked.colwise() = x_star;
  for (int t = 0; t < 5; ++t) at_optimum.Add(stacked);
  EXPECT_LE(ErgodicGradMetric(at_optimum, problem), 1e-30);

  const Vector z = Vector::Constant(3, 2.5);
  stacked.colwise() = z;
  const double expected = problem.FullGradient(z).squaredNorm();
  ErgodicState constant(3, 4);
  for (int t = 1; t <= 50; ++t) {
    constant.Add(stacked);
    EXPECT_NEAR(ErgodicGradMetric(constant, problem), expected, 1e-12 * expected);
  }
}

TEST(ErgodicGradMetric, DecaysInConvexMode) {
  LogisticDataOptions options;
  options.samples = 600;
  options.dimension = 10;
  options.feature_decay = 0.5;
  const LogisticProblem problem(Shard(SyntheticLogisticData(options, 1), 6), 0.0);
  RunConfig config;
  config.algorithm = Algorithm::kCompressedScaffnew;
  config.gamma = 2.0 / problem.smoothness() * (1.0 - 1e-9);
  config.p = 0.5;
  config.s = 2;
  config.eta = 0.9 * EtaRec(6, 2);
  config.seed = 3;
  Simulator sim(problem, config);
  ErgodicState ergodic(10, 6);
  ergodic.Add(sim.state().x);
  double at_200 = 0.0;
  for (int t = 1; t <= 2000; ++t) {
    sim.Step();
    ergodic.Add(sim.state().x);
    if (t == 200) at_200 = ErgodicGradMetric(ergodic, problem);
  }
  EXPECT_EQ(ergodic.horizon(), 2000);
  EXPECT_LE(ErgodicGradMetric(ergodic, problem), at_200 / 3.0);
}

TEST(ErgodicBound, ScalesInverselyWithHorizon) {
  const double at_10 = ErgodicBound(2.0, 0.5, 0.4, 0.5, 6, 2, 3.0, 10);
  const double at_21 = ErgodicBound(2.0, 0.5, 0.4, 0.5, 6, 2, 3.0, 21);
  EXPECT_GT(at_10, 0.0);
  EXPECT_NEAR(at_10 / at_21, 2.0, 1e-12);
  const double nu = AggregationVarianceFactor(6, 2);
  const double bracket = (32.0 * 8 * 0.25 + 8.0) / 1.0 + 16.0 * 4 * 0.5 +
                         8.0 * 4 * 0.5 / (0.4 * (1.0 - nu - 0.5));
  EXPECT_NEAR(at_10, bracket * 3.0 / 11.0 / 6.0, 1e-12 * at_10);
  EXPECT_THROW(ErgodicBound(2.0, 0.5, 0.4, EtaRec(6, 2), 6, 2, 3.0, 10), ConfigError);
}

TEST(AggregationVarianceFactor, Examples) {
  EXPECT_EQ(AggregationVarianceFactor(5, 5), 0.0);
  EXPECT_DOUBLE_EQ(AggregationVarianceFactor(3, 2), 0.25);
  for (int n = 2; n < 20; ++n) {
    for (int s = 2; s <= n; ++s) {
      EXPECT_NEAR(1.0 - AggregationVarianceFactor(n, s), EtaRec(n, s), 1e-15);
    }
  }
}

// One step from a frozen state, averaged over independent rounds.
TEST(Lyapunov, ExpectedOneStepContraction) {
  const QuadraticProblem problem(RandomQuadraticTargets(8, 6, 5));
  const ReferenceSolution ref = ExactReference(problem);
  RunConfig config;
  config.algorithm = Algorithm::kCompressedScaffnew;
  config.gamma = 0.9;
  config.p = 0.4;
  config.s = 3;
  config.eta = EtaRec(6, 3);
  WorldState frozen = WorldState::Zero(8, 6);
  frozen.x = RandomQuadraticTargets(8, 6, 11);
  frozen.h = Center(RandomQuadraticTargets(8, 6, 12));
  const double psi = Lyapunov(frozen, ref, config.gamma, config.p, config.eta, 6, 3);
  const double rho = RateRho(config.gamma, 1.0, 1.0, config.p, config.eta, 3, 6);
  constexpr int kSamples = 4000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int k = 0; k < kSamples; ++k) {
    config.seed = static_cast<std::uint64_t>(k);
    Simulator sim(problem, config, frozen);
    sim.Step();
    const double next =
        Lyapunov(sim.state(), ref, config.gamma, config.p, config.eta, 6, 3);
    sum += next;
    sum_sq += next * next;
  }
  const double mean = sum / kSamples;
  const double stderr_mean = std::sqrt((sum_sq / kSamples - mean * mean) / kSamples);
  EXPECT_LE(mean, rho * psi + 3.0 * stderr_mean);
}

}  // namespace
}  // namespace cscaffnew
