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

#ifndef CSCAFFNEW_TUNING_H_
#define CSCAFFNEW_TUNING_H_

namespace cscaffnew {

// Recommended hyperparameters and the predicted complexity factors, with
// the log(1/epsilon) factor left out.
struct TuningReport {
  int n = 0;
  int d = 0;
  double kappa = 0.0;
  double c = 0.0;

  int s_rec = 0;
  double p_rec = 0.0;
  double eta_rec = 0.0;

  double iter_factor = 0.0;         // kappa + n/(s p^2)
  double downcom_factor = 0.0;      // p d iter_factor
  double upcom_factor = 0.0;        // p ceil(sd/n) iter_factor
  double upcom_factor_slack = 0.0;  // p (sd/n + 1) iter_factor
  double totalcom_factor = 0.0;     // upcom + c downcom

  double gamma = 0.0;  // in units of 1/L
  double rho = 0.0;
  double rho_sharp = 0.0;
};

// n(s-1)/(s(n-1)). Throws ConfigError for s < 2 or s > n.
double EtaRec(int n, int s);

// min(sqrt(n/(s kappa)), 1). Throws ConfigError when kappa is infinite
// (convex mode needs an explicit p) or below 1.
double PRec(int n, int s, double kappa);

// min(sqrt((1 - rho_sharp)(n-1)/(eta(s-1))), 1)
double POpt(int n, int s, double eta, double rho_sharp);

// Scaffnew's choice 1/sqrt(kappa).
double PScaffnew(double kappa);

// min(n, max(2, floor(n/d), floor(c n)))
int SRec(int n, int d, double c);

struct ComplexityFactors {
  double iter_factor;
  double downcom_factor;
  double upcom_factor;
  double upcom_factor_slack;
  double totalcom_factor;
};
ComplexityFactors ComputeComplexityFactors(int n, int d, int s, double p, double kappa,
                                           double c);

// max(1 - gamma mu, gamma L - 1)^2
double RhoSharp(double gamma, double mu, double l);

// max((1-gamma mu)^2, (gamma L-1)^2, 1 - p^2 eta (s-1)/(n-1)). Throws
// ConfigError naming the violated condition when gamma or eta is out of range.
double RateRho(double gamma, double mu, double l, double p, double eta, int s, int n);

// Recommended setting for (n, d, kappa, c) with gamma = 2/(L+mu) (1 - 1e-9).
TuningReport Tune(int n, int d, double kappa, double c);

}  // namespace cscaffnew

#endif  // CSCAFFNEW_TUNING_H_
