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

#ifndef CSCAFFNEW_PROBLEMS_H_
#define CSCAFFNEW_PROBLEMS_H_

#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "cscaffnew/dataio.h"

namespace cscaffnew {

using Vector = Eigen::VectorXd;
// Collection of n client vectors in R^d, one per column (d x n).
using ClientMatrix = Eigen::MatrixXd;

// Finite-sum objective f(x) = (1/n) sum_i f_i(x). Every f_i is assumed
// L-smooth and mu-strongly convex with the same constants. Oracles are pure
// and may be called concurrently.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual int client_count() const = 0;
  virtual int dimension() const = 0;

  virtual double Value(int client, const Eigen::Ref<const Vector>& x) const = 0;
  virtual void Gradient(int client, const Eigen::Ref<const Vector>& x,
                        Eigen::Ref<Vector> out) const = 0;

  double smoothness() const { return smoothness_; }
  double strong_convexity() const { return strong_convexity_; }
  // L / mu, or +infinity in the merely convex case.
  double condition_number() const;

  double Objective(const Eigen::Ref<const Vector>& x) const;
  Vector FullGradient(const Eigen::Ref<const Vector>& x) const;
  Vector ClientGradient(int client, const Eigen::Ref<const Vector>& x) const;

 protected:
  Problem(double smoothness, double strong_convexity);

 private:
  double smoothness_;
  double strong_convexity_;
};

// lambda_max(A^T A) / (4M) for the data matrix with rows a_m, by power
// iteration (relative tolerance 1e-9, at most 1000 iterations). This is the
// smoothness constant of the unregularized mean logistic loss.
double SmoothnessConstant(const Dataset& dataset, int dimension = 0);
// Same constant for the union of the retained shards.
double SmoothnessConstant(const ShardedDataset& shards);
// Largest per-shard constant; diagnostic only.
double MaxShardSmoothnessConstant(const ShardedDataset& shards);

// f_i(x) = (1/M_i) sum_m log(1 + exp(-b_m a_m^T x)) + (mu/2)||x||^2 over the
// i-th shard, with L = L0 + mu where L0 = SmoothnessConstant(shards).
class LogisticProblem final : public Problem {
 public:
  LogisticProblem(const ShardedDataset& shards, double mu);
  // Variant with an externally supplied L0.
  LogisticProblem(const ShardedDataset& shards, double mu, double l0);

  int client_count() const override { return static_cast<int>(rows_.size()); }
  int dimension() const override { return dimension_; }
  double Value(int client, const Eigen::Ref<const Vector>& x) const override;
  void Gradient(int client, const Eigen::Ref<const Vector>& x,
                Eigen::Ref<Vector> out) const override;

  double unregularized_smoothness() const { return l0_; }

 private:
  using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  int dimension_;
  double mu_;
  double l0_;
  // Per client, rows b_m * a_m^T so that the margin is simply row * x.
  std::vector<SparseRows> rows_;
};

// f_i(x) = 0.5 ||x - b_i||^2: L = mu = 1, closed-form minimizer.
class QuadraticProblem final : public Problem {
 public:
  // One target per column; requires n >= 2.
  explicit QuadraticProblem(ClientMatrix targets);
  explicit QuadraticProblem(const std::vector<Vector>& targets);

  int client_count() const override { return static_cast<int>(targets_.cols()); }
  int dimension() const override { return static_cast<int>(targets_.rows()); }
  double Value(int client, const Eigen::Ref<const Vector>& x) const override;
  void Gradient(int client, const Eigen::Ref<const Vector>& x,
                Eigen::Ref<Vector> out) const override;

  const ClientMatrix& targets() const { return targets_; }
  // mean_i b_i
  Vector Minimizer() const;
  // Columns h_i* = x* - b_i; they sum to zero.
  ClientMatrix OptimalControlVariates() const;

 private:
  ClientMatrix targets_;
};

// Numerically stable pieces of the logistic loss.
double LogOnePlusExp(double z);
double Sigmoid(double z);

}  // namespace cscaffnew

#endif  // CSCAFFNEW_PROBLEMS_H_
