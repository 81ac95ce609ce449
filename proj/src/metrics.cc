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

#include <string>

#include "cscaffnew/errors.h"

namespace cscaffnew {

namespace {

ReferenceSolution Finish(const Problem& problem, Vector x, double residual,
                         std::int64_t iterations) {
  ReferenceSolution ref;
  const int n = problem.client_count();
  ref.h.resize(problem.dimension(), n);
  Vector g(problem.dimension());
  for (int i = 0; i < n; ++i) {
    problem.Gradient(i, x, g);
    ref.h.col(i) = g;
  }
  ref.f = problem.Objective(x);
  ref.x = std::move(x);
  ref.residual = residual;
  ref.iterations = iterations;
  return ref;
}

}  // namespace

ReferenceSolution ReferenceSolve(const Problem& problem, const ReferenceOptions& options) {
  Vector x = options.start.value_or(Vector::Zero(problem.dimension()));
  const double step = 1.0 / problem.smoothness();
  double residual = 0.0;
  for (std::int64_t k = 0; k <= options.max_iterations; ++k) {
    const Vector g = problem.FullGradient(x);
    residual = g.norm();
    if (residual <= options.tolerance) return Finish(problem, std::move(x), residual, k);
    if (k == options.max_iterations) break;
    x -= step * g;
  }
  throw ConvergenceError("reference solve did not reach ||grad f|| <= " +
                             std::to_string(options.tolerance) + "; final residual " +
                             std::to_string(residual),
                         residual);
}

ReferenceSolution ExactReference(const QuadraticProblem& problem) {
  ReferenceSolution ref;
  ref.x = problem.Minimizer();
  ref.h = problem.OptimalControlVariates();
  ref.f = problem.Objective(ref.x);
  ref.residual = problem.FullGradient(ref.x).norm();
  return ref;
}

double Lyapunov(const WorldState& state, const ReferenceSolution& reference, double gamma,
                double p, double eta, int n, int s) {
  const double x_term = (state.x.colwise() - reference.x).squaredNorm() / gamma;
  const double h_weight = gamma / (p * p * eta) * (n - 1.0) / (s - 1.0);
  return x_term + h_weight * (state.h - reference.h).squaredNorm();
}

double ObjectiveGap(const Problem& problem, const Eigen::Ref<const Vector>& x,
                    const ReferenceSolution& reference) {
  return problem.Objective(x) - reference.f;
}

void ErgodicState::Add(const ClientMatrix& x) {
  sums_ += x;
  ++count_;
}

ClientMatrix ErgodicState::ClientAverages() const {
  if (count_ == 0) throw ContractError("ergodic average of an empty sequence");
  return sums_ / static_cast<double>(count_);
}

Vector ErgodicState::Average() const { return ClientAverages().rowwise().mean(); }

double ErgodicGradMetric(const ErgodicState& ergodic, const Problem& problem) {
  const ClientMatrix averages = ergodic.ClientAverages();
  double total = 0.0;
  for (Eigen::Index i = 0; i < averages.cols(); ++i) {
    total += problem.FullGradient(averages.col(i)).squaredNorm();
  }
  return total / static_cast<double>(averages.cols());
}

double AggregationVarianceFactor(int n, int s) {
  return static_cast<double>(n - s) / (static_cast<double>(s) * (n - 1));
}

double ErgodicBound(double l, double gamma, double p, double eta, int n, int s, double psi0,
                    std::int64_t horizon) {
  const double nu = AggregationVarianceFactor(n, s);
  const double slack = 1.0 - nu - eta;
  if (!(slack > 0.0)) throw ConfigError("ergodic bound needs eta < 1 - nu");
  const double bracket = (32.0 * l * l * l * gamma * gamma + 4.0 * l) / (2.0 - gamma * l) +
                         16.0 * l * l * gamma + 8.0 * l * l * gamma / (p * slack);
  return bracket * psi0 / static_cast<double>(horizon + 1) / n;
}

}  // namespace cscaffnew
