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
#include "cscaffnew/problems.h"

#include <cmath>
#include <limits>
#include <string>

#include "cscaffnew/errors.h"

namespace cscaffnew {

namespace {

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

SparseRows BuildRows(const std::vector<Sample>& samples, int dimension,
                     bool scale_by_label) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t m = 0; m < samples.size(); ++m) {
    const double scale = scale_by_label ? samples[m].label : 1.0;
    for (const Feature& f : samples[m].features) {
      if (f.index > dimension) {
        throw ContractError("feature index " + std::to_string(f.index) +
                            " exceeds model dimension " + std::to_string(dimension));
      }
      triplets.emplace_back(static_cast<int>(m), f.index - 1, scale * f.value);
    }
  }
  SparseRows rows(static_cast<Eigen::Index>(samples.size()), dimension);
  rows.setFromTriplets(triplets.begin(), triplets.end());
  rows.makeCompressed();
  return rows;
}

double PowerIterationTopEigenvalue(const SparseRows& a) {
  const Eigen::Index d = a.cols();
  Vector v(d);
  for (Eigen::Index k = 0; k < d; ++k) v[k] = 1.0 + 1.0 / static_cast<double>(k + 2);
  v.normalize();

  double lambda = 0.0;
  for (int iter = 0; iter < 1000; ++iter) {
    Vector av = a * v;
    Vector w = a.transpose() * av;
    const double next = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) break;
    v = w / norm;
    const bool converged = std::abs(next - lambda) <= 1e-9 * std::abs(next);
    lambda = next;
    if (converged) break;
  }
  return lambda;
}

}  // namespace

double LogOnePlusExp(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Problem::Problem(double smoothness, double strong_convexity)
    : smoothness_(smoothness), strong_convexity_(strong_convexity) {
  if (!(strong_convexity >= 0.0) || !(smoothness >= strong_convexity)) {
    throw ContractError("problem constants must satisfy L >= mu >= 0");
  }
}

double Problem::condition_number() const {
  if (strong_convexity_ == 0.0) return std::numeric_limits<double>::infinity();
  return smoothness_ / strong_convexity_;
}

double Problem::Objective(const Eigen::Ref<const Vector>& x) const {
  double sum = 0.0;
  for (int i = 0; i < client_count(); ++i) sum += Value(i, x);
  return sum / client_count();
}

Vector Problem::FullGradient(const Eigen::Ref<const Vector>& x) const {
  Vector total = Vector::Zero(dimension());
  Vector g(dimension());
  for (int i = 0; i < client_count(); ++i) {
    Gradient(i, x, g);
    total += g;
  }
  return total / client_count();
}

Vector Problem::ClientGradient(int client, const Eigen::Ref<const Vector>& x) const {
  Vector g(dimension());
  Gradient(client, x, g);
  return g;
}

double SmoothnessConstant(const Dataset& dataset, int dimension) {
  if (dataset.size() == 0) throw ContractError("smoothness constant of an empty dataset");
  if (dimension == 0) dimension = dataset.max_index;
  if (dimension <= 0) throw ContractError("smoothness constant: all-zero data matrix");
  const SparseRows a = BuildRows(dataset.samples, dimension, false);
  const double lambda = PowerIterationTopEigenvalue(a);
  if (!(lambda > 0.0)) throw ContractError("smoothness constant: all-zero data matrix");
  return lambda / (4.0 * static_cast<double>(dataset.size()));
}

double SmoothnessConstant(const ShardedDataset& shards) {
  Dataset retained;
  retained.max_index = shards.dimension;
  for (const Dataset& shard : shards.shards) {
    retained.samples.insert(retained.samples.end(), shard.samples.begin(),
                            shard.samples.end());
  }
  return SmoothnessConstant(retained, shards.dimension);
}

double MaxShardSmoothnessConstant(const ShardedDataset& shards) {
  double worst = 0.0;
  for (const Dataset& shard : shards.shards) {
    worst = std::max(worst, SmoothnessConstant(shard, shards.dimension));
  }
  return worst;
}

LogisticProblem::LogisticProblem(const ShardedDataset& shards, double mu)
    : LogisticProblem(shards, mu, SmoothnessConstant(shards)) {}

LogisticProblem::LogisticProblem(const ShardedDataset& shards, double mu, double l0)
    : Problem(l0 + mu, mu), dimension_(shards.dimension), mu_(mu), l0_(l0) {
  if (shards.shards.empty()) throw ContractError("logistic problem needs at least one shard");
  rows_.reserve(shards.shards.size());
  for (const Dataset& shard : shards.shards) {
    if (shard.size() == 0) throw ContractError("logistic problem: empty shard");
    rows_.push_back(BuildRows(shard.samples, dimension_, true));
  }
}

double LogisticProblem::Value(int client, const Eigen::Ref<const Vector>& x) const {
  const SparseRows& a = rows_[static_cast<std::size_t>(client)];
  const Vector margins = a * x;
  double loss = 0.0;
  for (Eigen::Index m = 0; m < margins.size(); ++m) loss += LogOnePlusExp(-margins[m]);
  return loss / static_cast<double>(a.rows()) + 0.5 * mu_ * x.squaredNorm();
}

void LogisticProblem::Gradient(int client, const Eigen::Ref<const Vector>& x,
                               Eigen::Ref<Vector> out) const {
  const SparseRows& a = rows_[static_cast<std::size_t>(client)];
  Vector weights = a * x;
  const double inv_m = 1.0 / static_cast<double>(a.rows());
  for (Eigen::Index m = 0; m < weights.size(); ++m) {
    weights[m] = -Sigmoid(-weights[m]) * inv_m;
  }
  out.noalias() = a.transpose() * weights;
  out += mu_ * x;
}

QuadraticProblem::QuadraticProblem(ClientMatrix targets)
    : Problem(1.0, 1.0), targets_(std::move(targets)) {
  if (targets_.cols() < 2) throw ContractError("quadratic problem needs n >= 2 clients");
}

namespace {

ClientMatrix StackTargets(const std::vector<Vector>& targets) {
  if (targets.empty()) return ClientMatrix();
  const Eigen::Index d = targets.front().size();
  ClientMatrix stacked(d, static_cast<Eigen::Index>(targets.size()));
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i].size() != d) {
      throw ContractError("quadratic problem: target dimension mismatch");
    }
    stacked.col(static_cast<Eigen::Index>(i)) = targets[i];
  }
  return stacked;
}

}  // namespace

QuadraticProblem::QuadraticProblem(const std::vector<Vector>& targets)
    : QuadraticProblem(StackTargets(targets)) {}

double QuadraticProblem::Value(int client, const Eigen::Ref<const Vector>& x) const {
  return 0.5 * (x - targets_.col(client)).squaredNorm();
}

void QuadraticProblem::Gradient(int client, const Eigen::Ref<const Vector>& x,
                                Eigen::Ref<Vector> out) const {
  out = x - targets_.col(client);
}

Vector QuadraticProblem::Minimizer() const { return targets_.rowwise().mean(); }

ClientMatrix QuadraticProblem::OptimalControlVariates() const {
  return (-targets_).colwise() + Minimizer();
}

}  // namespace cscaffnew
