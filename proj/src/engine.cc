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
#include "cscaffnew/engine.h"

#include <cmath>
#include <sstream>

#include "cscaffnew/errors.h"

namespace cscaffnew {

void CommLedger::Charge(const RoundMask& mask) {
  upcom += mask.MaxColumnOnes();
  downcom += mask.d;
  ++rounds;
}

void CommLedger::ChargeFull(int d) {
  upcom += d;
  downcom += d;
  ++rounds;
}

std::string_view AlgorithmName(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kGradientDescent:
      return "gd";
    case Algorithm::kScaffnew:
      return "scaffnew";
    case Algorithm::kCompressedScaffnew:
      return "compressed_scaffnew";
    case Algorithm::kDualForm:
      return "alg2";
  }
  return "unknown";
}

Algorithm ParseAlgorithm(std::string_view name) {
  if (name == "gd") return Algorithm::kGradientDescent;
  if (name == "scaffnew") return Algorithm::kScaffnew;
  if (name == "compressed_scaffnew") return Algorithm::kCompressedScaffnew;
  if (name == "alg2") return Algorithm::kDualForm;
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

double MaxEta(int n, int s) {
  return static_cast<double>(n) * (s - 1) / (static_cast<double>(s) * (n - 1));
}

namespace {

std::string Describe(const char* name, double value) {
  std::ostringstream out;
  out.precision(17);
  out << name << "=" << value;
  return out.str();
}

}  // namespace

void ValidateRunConfig(const RunConfig& config, const Problem& problem) {
  const double l = problem.smoothness();
  if (!(config.gamma > 0.0)) {
    throw ConfigError("violated 0 < gamma (" + Describe("gamma", config.gamma) + ")");
  }
  if (!(config.gamma * l < 2.0)) {
    throw ConfigError("violated gamma < 2/L (" + Describe("gamma", config.gamma) + ", " +
                      Describe("L", l) + ")");
  }
  if (!(config.c >= 0.0 && config.c <= 1.0)) {
    throw ConfigError("violated 0 <= c <= 1 (" + Describe("c", config.c) + ")");
  }
  if (config.iterations < 0) throw ConfigError("violated iterations >= 0");
  if (config.algorithm == Algorithm::kGradientDescent) return;

  if (!(config.p > 0.0 && config.p <= 1.0)) {
    throw ConfigError("violated 0 < p <= 1 (" + Describe("p", config.p) + ")");
  }
  if (config.algorithm == Algorithm::kScaffnew) return;

  const int n = problem.client_count();
  if (config.s < 2 || config.s > n) {
    throw ConfigError("violated 2 <= s <= n (s=" + std::to_string(config.s) +
                      ", n=" + std::to_string(n) + ")");
  }
  const double eta_max = MaxEta(n, config.s);
  if (!(config.eta > 0.0 && config.eta <= eta_max)) {
    throw ConfigError("violated 0 < eta <= n(s-1)/(s(n-1)) (" + Describe("eta", config.eta) +
                      ", " + Describe("bound", eta_max) + ")");
  }
  if (config.algorithm == Algorithm::kDualForm) {
    const double tau = config.DualStep();
    const double tau_max = config.p / config.gamma * eta_max;
    if (!(tau > 0.0 && tau <= tau_max * (1.0 + 1e-12))) {
      throw ConfigError("violated 0 < tau <= (p/gamma) n(s-1)/(s(n-1)) (" +
                        Describe("tau", tau) + ", " + Describe("bound", tau_max) + ")");
    }
  }
}

WorldState WorldState::Zero(int d, int n) {
  WorldState state;
  state.x = ClientMatrix::Zero(d, n);
  state.h = ClientMatrix::Zero(d, n);
  state.x_bar_last = Vector::Zero(d);
  return state;
}

ClientMatrix Center(const ClientMatrix& v) {
  const Vector mean = v.rowwise().mean();
  return v.colwise() - mean;
}

Vector LocalStep(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& h,
                 const Eigen::Ref<const Vector>& gradient, double gamma) {
  return x - gamma * gradient + gamma * h;
}

Vector Aggregate(const ClientMatrix& xhat, const RoundMask& mask) {
  if (mask.client_count() != xhat.cols() || mask.d != xhat.rows()) {
    throw ContractError("aggregate: mask shape differs from the client state");
  }
  Vector sum = Vector::Zero(mask.d);
  std::vector<int> row_count(static_cast<std::size_t>(mask.d), 0);
  for (int i = 0; i < mask.client_count(); ++i) {
    for (int k : mask.columns[static_cast<std::size_t>(i)].rows) {
      sum[k] += xhat(k, i);
      ++row_count[static_cast<std::size_t>(k)];
    }
  }
  for (int k = 0; k < mask.d; ++k) {
    if (row_count[static_cast<std::size_t>(k)] != mask.s) {
      throw ContractError("aggregate: row " + std::to_string(k) + " has " +
                          std::to_string(row_count[static_cast<std::size_t>(k)]) +
                          " ones, expected s=" + std::to_string(mask.s));
    }
  }
  return sum * (1.0 / mask.s);
}

void ControlUpdate(Eigen::Ref<Vector> h, const Eigen::Ref<const Vector>& x_bar,
                   const Eigen::Ref<const Vector>& xhat, const ClientColumn& column, double p,
                   double eta, double gamma) {
  const double coefficient = p * eta / gamma;
  for (int k : column.rows) h[k] += coefficient * (x_bar[k] - xhat[k]);
}

ClientMatrix DualDirection(const ClientMatrix& xhat, const RoundMask& mask, double a,
                           bool communicated) {
  ClientMatrix d = ClientMatrix::Zero(xhat.rows(), xhat.cols());
  if (!communicated) return d;
  const Vector x_bar = Aggregate(xhat, mask);
  for (int i = 0; i < mask.client_count(); ++i) {
    for (int k : mask.columns[static_cast<std::size_t>(i)].rows) {
      d(k, i) = a * (xhat(k, i) - x_bar[k]);
    }
  }
  return d;
}

namespace {

ClientMatrix LocalSteps(const WorldState& state, const Problem& problem, double gamma,
                        const ClientMatrix& correction) {
  const int n = problem.client_count();
  ClientMatrix xhat(state.x.rows(), n);
  Vector gradient(state.x.rows());
  for (int i = 0; i < n; ++i) {
    problem.Gradient(i, state.x.col(i), gradient);
    xhat.col(i) = LocalStep(state.x.col(i), correction.col(i), gradient, gamma);
  }
  return xhat;
}

void Broadcast(WorldState& state, const Vector& x_bar) {
  state.x.colwise() = x_bar;
  state.x_bar_last = x_bar;
}

}  // namespace

void StepGradientDescent(WorldState& state, const RunConfig& config, const Problem& problem,
                         CommLedger& ledger) {
  const int n = problem.client_count();
  const Vector x = state.x.col(0);
  Vector sum = Vector::Zero(x.size());
  Vector gradient(x.size());
  for (int i = 0; i < n; ++i) {
    problem.Gradient(i, x, gradient);
    sum += gradient;
  }
  const Vector next = x - config.gamma * (sum * (1.0 / n));
  Broadcast(state, next);
  ledger.ChargeFull(static_cast<int>(x.size()));
  ++state.t;
}

void StepScaffnew(WorldState& state, const RunConfig& config, const Problem& problem,
                  const RoundDraw& draw, CommLedger& ledger) {
  const int n = problem.client_count();
  const ClientMatrix xhat = LocalSteps(state, problem, config.gamma, state.h);
  if (!draw.communicate) {
    state.x = xhat;
  } else {
    Vector sum = Vector::Zero(xhat.rows());
    for (int i = 0; i < n; ++i) sum += xhat.col(i);
    const Vector x_bar = sum * (1.0 / n);
    const double coefficient = config.p / config.gamma;
    for (int i = 0; i < n; ++i) state.h.col(i) += coefficient * (x_bar - xhat.col(i));
    Broadcast(state, x_bar);
    ledger.ChargeFull(static_cast<int>(xhat.rows()));
  }
  ++state.t;
}

void StepCompressed(WorldState& state, const RunConfig& config, const Problem& problem,
                    const RoundDraw& draw, CommLedger& ledger) {
  const ClientMatrix xhat = LocalSteps(state, problem, config.gamma, state.h);
  if (!draw.communicate) {
    state.x = xhat;
  } else {
    const Vector x_bar = Aggregate(xhat, draw.mask);
    for (int i = 0; i < problem.client_count(); ++i) {
      ControlUpdate(state.h.col(i), x_bar, xhat.col(i),
                    draw.mask.columns[static_cast<std::size_t>(i)], config.p, config.eta,
                    config.gamma);
    }
    Broadcast(state, x_bar);
    ledger.Charge(draw.mask);
  }
  ++state.t;
}

void StepDual(WorldState& state, DualState& dual, const RunConfig& config,
              const Problem& problem, const RoundDraw& draw, CommLedger& ledger) {
  const ClientMatrix xhat = LocalSteps(state, problem, config.gamma, -dual.u);
  if (!draw.communicate) {
    state.x = xhat;
  } else {
    const Vector x_bar = Aggregate(xhat, draw.mask);
    const ClientMatrix direction = DualDirection(xhat, draw.mask, dual.a, true);
    dual.u += (dual.tau / (1.0 + dual.omega)) * direction;
    Broadcast(state, x_bar);
    ledger.Charge(draw.mask);
  }
  state.h = -dual.u;
  ++state.t;
}

Simulator::Simulator(const Problem& problem, RunConfig config)
    : Simulator(problem, config,
                WorldState::Zero(problem.dimension(), problem.client_count())) {}

Simulator::Simulator(const Problem& problem, RunConfig config, WorldState initial)
    : problem_(problem), config_(config), state_(std::move(initial)), rng_(config.seed) {
  const int n = problem.client_count();
  const int d = problem.dimension();
  if (config_.algorithm == Algorithm::kGradientDescent) {
    config_.p = 1.0;
    config_.s = n;
    config_.eta = 1.0;
  } else if (config_.algorithm == Algorithm::kScaffnew) {
    config_.s = n;
    config_.eta = 1.0;
  }
  ValidateRunConfig(config_, problem);
  if (state_.x.rows() != d || state_.x.cols() != n || state_.h.rows() != d ||
      state_.h.cols() != n) {
    throw ContractError("initial state shape differs from the problem");
  }
  if (state_.x_bar_last.size() != d) state_.x_bar_last = Vector::Zero(d);
  const double h_scale = 1.0 + state_.h.cwiseAbs().maxCoeff() * n;
  if (state_.h.rowwise().sum().lpNorm<Eigen::Infinity>() > 1e-9 * h_scale) {
    throw ContractError("initial control variates must sum to zero");
  }
  ledger_.c = config_.c;

  if (config_.algorithm == Algorithm::kCompressedScaffnew ||
      config_.algorithm == Algorithm::kDualForm) {
    pattern_.emplace(d, n, config_.s);
  }
  if (config_.algorithm == Algorithm::kDualForm) {
    DualState dual;
    dual.u = -state_.h;
    dual.tau = config_.DualStep();
    dual.a = (n - 1.0) / (config_.p * (config_.s - 1.0));
    dual.omega = dual.a - 1.0;
    dual_ = std::move(dual);
  }
}

RoundDraw Simulator::Draw(std::int64_t t) const {
  RoundDraw draw;
  draw.communicate = rng_.Coin(t, config_.p);
  if (draw.communicate && pattern_) draw.mask = DrawRoundMask(*pattern_, rng_, t);
  return draw;
}

bool Simulator::Step() {
  switch (config_.algorithm) {
    case Algorithm::kGradientDescent:
      StepGradientDescent(state_, config_, problem_, ledger_);
      return true;
    case Algorithm::kScaffnew: {
      const RoundDraw draw = Draw(state_.t);
      StepScaffnew(state_, config_, problem_, draw, ledger_);
      return draw.communicate;
    }
    case Algorithm::kCompressedScaffnew: {
      const RoundDraw draw = Draw(state_.t);
      StepCompressed(state_, config_, problem_, draw, ledger_);
      return draw.communicate;
    }
    case Algorithm::kDualForm: {
      const RoundDraw draw = Draw(state_.t);
      StepDual(state_, *dual_, config_, problem_, draw, ledger_);
      return draw.communicate;
    }
  }
  return false;
}

}  // namespace cscaffnew
