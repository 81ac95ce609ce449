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
#include "cscaffnew/tuning.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "cscaffnew/errors.h"

namespace cscaffnew {

double EtaRec(int n, int s) {
  if (s < 2 || s > n) {
    throw ConfigError("eta_rec: s must satisfy 2 <= s <= n (got s=" + std::to_string(s) + ")");
  }
  return static_cast<double>(n) * (s - 1) / (static_cast<double>(s) * (n - 1));
}

double PRec(int n, int s, double kappa) {
  if (!std::isfinite(kappa)) throw ConfigError("convex mode requires explicit p");
  if (!(kappa >= 1.0)) throw ConfigError("p_rec: kappa must be >= 1");
  return std::min(std::sqrt(static_cast<double>(n) / (s * kappa)), 1.0);
}

double POpt(int n, int s, double eta, double rho_sharp) {
  return std::min(std::sqrt((1.0 - rho_sharp) * (n - 1) / (eta * (s - 1))), 1.0);
}

double PScaffnew(double kappa) {
  if (!std::isfinite(kappa)) throw ConfigError("convex mode requires explicit p");
  if (!(kappa >= 1.0)) throw ConfigError("p_scaffnew: kappa must be >= 1");
  return 1.0 / std::sqrt(kappa);
}

int SRec(int n, int d, double c) {
  // Slack for representation error in c * n, e.g. 0.29 * 100.
  const int by_dimension = n / d;
  const int by_cost = static_cast<int>(std::floor(c * n + 1e-9));
  return std::min(n, std::max({2, by_dimension, by_cost}));
}

ComplexityFactors ComputeComplexityFactors(int n, int d, int s, double p, double kappa,
                                           double c) {
  ComplexityFactors f{};
  f.iter_factor = kappa + static_cast<double>(n) / (s * p * p);
  f.downcom_factor = p * d * f.iter_factor;
  const long long sd = static_cast<long long>(s) * d;
  const double column_ones = static_cast<double>((sd + n - 1) / n);
  f.upcom_factor = p * column_ones * f.iter_factor;
  f.upcom_factor_slack = p * (static_cast<double>(sd) / n + 1.0) * f.iter_factor;
  f.totalcom_factor = f.upcom_factor + c * f.downcom_factor;
  return f;
}

double RhoSharp(double gamma, double mu, double l) {
  const double contraction = 1.0 - gamma * mu;
  const double expansion = gamma * l - 1.0;
  return std::max(contraction * contraction, expansion * expansion);
}

double RateRho(double gamma, double mu, double l, double p, double eta, int s, int n) {
  if (!(gamma > 0.0)) throw ConfigError("rate: violated 0 < gamma");
  if (!(gamma * l < 2.0)) throw ConfigError("rate: violated gamma < 2/L");
  if (!(eta > 0.0)) throw ConfigError("rate: violated 0 < eta");
  if (!(eta <= EtaRec(n, s))) throw ConfigError("rate: violated eta <= n(s-1)/(s(n-1))");
  if (!(p > 0.0 && p <= 1.0)) throw ConfigError("rate: violated 0 < p <= 1");
  const double control = 1.0 - p * p * eta * (s - 1) / (n - 1);
  return std::max(RhoSharp(gamma, mu, l), control);
}

TuningReport Tune(int n, int d, double kappa, double c) {
  if (n < 2 || d < 1) throw ConfigError("tune: need n >= 2 and d >= 1");
  if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("tune: c must lie in [0, 1]");
  TuningReport report;
  report.n = n;
  report.d = d;
  report.kappa = kappa;
  report.c = c;
  report.s_rec = SRec(n, d, c);
  report.eta_rec = EtaRec(n, report.s_rec);
  report.p_rec = PRec(n, report.s_rec, kappa);

  const ComplexityFactors f =
      ComputeComplexityFactors(n, d, report.s_rec, report.p_rec, kappa, c);
  report.iter_factor = f.iter_factor;
  report.downcom_factor = f.downcom_factor;
  report.upcom_factor = f.upcom_factor;
  report.upcom_factor_slack = f.upcom_factor_slack;
  report.totalcom_factor = f.totalcom_factor;

  const double l = 1.0;
  const double mu = 1.0 / kappa;
  report.gamma = 2.0 / (l + mu) * (1.0 - 1e-9);
  report.rho_sharp = RhoSharp(report.gamma, mu, l);
  report.rho = RateRho(report.gamma, mu, l, report.p_rec, report.eta_rec, report.s_rec, n);
  return report;
}

}  // namespace cscaffnew
