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

#ifndef CSCAFFNEW_METRICS_H_
#define CSCAFFNEW_METRICS_H_

#include <cstdint>
#include <optional>

#include "cscaffnew/engine.h"
#include "cscaffnew/problems.h"

namespace cscaffnew {

struct ReferenceSolution {
  Vector x;        // x*
  ClientMatrix h;  // h_i* = grad f_i(x*), columns sum to zero
  double f = 0.0;  // f(x*)
  double residual = 0.0;  // ||grad f(x*)||
  std::int64_t iterations = 0;
};

struct ReferenceOptions {
  double tolerance = 1e-12;
  std::int64_t max_iterations = 1'000'000;
  std::optional<Vector> start;  // defaults to zero
};

// Full-batch gradient descent with stepsize 1/L until ||grad f|| <= tolerance.
// Throws ConvergenceError (carrying the final residual) if the budget runs out.
ReferenceSolution ReferenceSolve(const Problem& problem, const ReferenceOptions& options = {});

// Closed form for the quadratic test problem.
ReferenceSolution ExactReference(const QuadraticProblem& problem);

// (1/gamma) sum ||x_i - x*||^2 + gamma/(p^2 eta) (n-1)/(s-1) sum ||h_i - h_i*||^2
double Lyapunov(const WorldState& state, const ReferenceSolution& reference, double gamma,
                double p, double eta, int n, int s);

// f(x) - f(x*)
double ObjectiveGap(const Problem& problem, const Eigen::Ref<const Vector>& x,
                    const ReferenceSolution& reference);

// Running per-client iterate sums for the convex-case ergodic averages.
class ErgodicState {
 public:
  ErgodicState(int d, int n) : sums_(ClientMatrix::Zero(d, n)) {}

  // Accumulates x^t; call for t = 0, 1, ..., T.
  void Add(const ClientMatrix& x);
  // T, i.e. one less than the number of accumulated iterates.
  std::int64_t horizon() const { return count_ - 1; }
  // Columns x~_i^T = sum_t x_i^t / (T + 1).
  ClientMatrix ClientAverages() const;
  // x~^T = mean_i x~_i^T
  Vector Average() const;

 private:
  ClientMatrix sums_;
  std::int64_t count_ = 0;
};

// (1/n) sum_i ||grad f(x~_i^T)||^2
double ErgodicGradMetric(const ErgodicState& ergodic, const Problem& problem);

// Closed-form upper bound on the same mean from the convex-case analysis:
// [ (32 L^3 g^2 + 4L)/(2 - gL) + 16 L^2 g + 8 L^2 g / (p(1 - nu - eta)) ]
//   * psi0 / (T+1) / n, with nu = (n-s)/(s(n-1)).
double ErgodicBound(double l, double gamma, double p, double eta, int n, int s, double psi0,
                    std::int64_t horizon);

// (n-s)/(s(n-1)): aggregation variance factor.
double AggregationVarianceFactor(int n, int s);

}  // namespace cscaffnew

#endif  // CSCAFFNEW_METRICS_H_
