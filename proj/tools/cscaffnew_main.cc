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
// Command-line driver: run experiments, print tuning reports, run the
// enumeration oracle suite.

#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cscaffnew/enumeration.h"
#include "cscaffnew/errors.h"
#include "cscaffnew/harness.h"
#include "cscaffnew/masks.h"
#include "cscaffnew/tuning.h"

namespace {

using namespace cscaffnew;

int RunCommand(const std::string& config_path) {
  const ExperimentConfig config = LoadExperimentConfig(config_path);
  const ExperimentResult result = RunExperiment(config);
  for (const auto& run : result.summary["runs"]) {
    std::printf("%-20s seed %-4llu rounds %-8lld totalcom %-14.6g final_gap %s\n",
                run["algorithm"].get<std::string>().c_str(),
                static_cast<unsigned long long>(run["seed"].get<std::uint64_t>()),
                static_cast<long long>(run["rounds"].get<std::int64_t>()),
                run["totalcom"].get<double>(),
                run["final_gap"].is_null() ? "-" : run["final_gap"].dump().c_str());
    if (run.contains("error")) {
      std::fprintf(stderr, "run failed: %s\n", run["error"].get<std::string>().c_str());
    }
  }
  if (!result.all_ok) {
    std::fprintf(stderr, "experiment finished with errors, see summary.json\n");
    return 1;
  }
  return 0;
}

int TuneCommand(int n, int d, double kappa, double c) {
  const TuningReport r = Tune(n, d, kappa, c);
  std::printf("n                  %d\n", r.n);
  std::printf("d                  %d\n", r.d);
  std::printf("kappa              %.17g\n", r.kappa);
  std::printf("c                  %.17g\n", r.c);
  std::printf("s_rec              %d\n", r.s_rec);
  std::printf("p_rec              %.17g\n", r.p_rec);
  std::printf("eta_rec            %.17g\n", r.eta_rec);
  std::printf("gamma_times_L      %.17g\n", r.gamma);
  std::printf("rho                %.17g\n", r.rho);
  std::printf("rho_sharp          %.17g\n", r.rho_sharp);
  std::printf("iter_factor        %.17g\n", r.iter_factor);
  std::printf("downcom_factor     %.17g\n", r.downcom_factor);
  std::printf("upcom_factor       %.17g\n", r.upcom_factor);
  std::printf("upcom_factor_slack %.17g\n", r.upcom_factor_slack);
  std::printf("totalcom_factor    %.17g\n", r.totalcom_factor);
  return 0;
}

int CheckCommand(double tolerance) {
  int failures = 0;
  int cases = 0;
  for (int n = 2; n <= 6; ++n) {
    for (int s = 2; s <= n; ++s) {
      for (int d = 1; d <= 5; ++d) {
        for (double p : {1.0, 0.5, 0.1}) {
          const EnumerationReport r = EnumerateIdentities(d, n, s, p, 20, 7);
          ++cases;
          if (!r.Passed(tolerance)) {
            ++failures;
            std::printf("FAIL d=%d n=%d s=%d p=%g worst_error=%.3e uniform=%d\n", d, n, s, p,
                        r.worst_error(), r.rows_uniform ? 1 : 0);
          }
        }
      }
    }
  }
  const bool rules_agree = ReachableMasks(TemplatePattern(2, 4, 2, TemplateRule::kBlock)) ==
                           ReachableMasks(TemplatePattern(2, 4, 2, TemplateRule::kSpread));
  if (!rules_agree) {
    ++failures;
    std::printf("FAIL block and spread rules reach different masks at (d,n,s)=(2,4,2)\n");
  }
  std::printf("%d enumeration cases, rule equivalence %s, %d failures\n", cases,
              rules_agree ? "ok" : "broken", failures);
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compressed Scaffnew simulator"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
  run->add_option("config", config_path, "experiment config file")->required();

  int n = 0;
  int d = 0;
  double kappa = 0.0;
  double c = 0.0;
  auto* tune = app.add_subcommand("tune", "print recommended parameters and complexity factors");
  tune->add_option("n", n, "number of clients")->required();
  tune->add_option("d", d, "model dimension")->required();
  tune->add_option("kappa", kappa, "condition number L/mu")->required();
  tune->add_option("c", c, "downlink weight in [0,1]")->required();

  double tolerance = 1e-12;
  auto* check = app.add_subcommand("check", "run the mask and dual-direction enumeration oracles");
  check->add_option("--tolerance", tolerance, "absolute tolerance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return RunCommand(config_path);
    if (*tune) return TuneCommand(n, d, kappa, c);
    if (*check) return CheckCommand(tolerance);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
