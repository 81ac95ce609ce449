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

#ifndef CSCAFFNEW_HARNESS_H_
#define CSCAFFNEW_HARNESS_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cscaffnew/engine.h"
#include "cscaffnew/metrics.h"
#include "cscaffnew/problems.h"
#include "cscaffnew/synthetic.h"
#include "cscaffnew/tuning.h"

namespace cscaffnew {

// Where the objective comes from.
struct DatasetSpec {
  enum class Kind { kFile, kQuadratic, kLogistic, kW8aLike };
  Kind kind = Kind::kQuadratic;
  std::string path;      // kFile
  int dimension = 0;     // kQuadratic
  std::uint64_t seed = 0;
  LogisticDataOptions logistic;  // kLogistic
  int samples = 49749;           // kW8aLike
  bool group_by_label = true;    // kW8aLike
};

// mu either given directly or as a multiple of L0.
struct MuRule {
  bool relative_to_l0 = false;
  double value = 0.0;
};

// Experiment description. Parsed from JSON; unknown keys are rejected at
// every level. See README.md for the schema.
struct ExperimentConfig {
  std::string name = "experiment";
  DatasetSpec dataset;
  int clients = 0;
  std::optional<MuRule> mu;  // required for logistic data, absent for quadratics
  std::vector<Algorithm> algorithms;
  double c = 0.0;
  std::optional<double> gamma;
  std::optional<double> p;
  std::optional<double> eta;
  std::optional<double> tau;
  std::optional<int> s;
  std::int64_t iterations = 0;
  std::vector<std::uint64_t> seeds{0};
  std::string output_dir = "out";
  int log_every = 1;  // log every k-th communication round
  std::optional<double> gap_target;
  // Called after every iteration.
  std::function<void(const Simulator&)> observer;
};

ExperimentConfig ParseExperimentConfig(std::string_view json_text,
                                       const std::string& base_dir = "");
ExperimentConfig LoadExperimentConfig(const std::string& path);

// A built objective plus its constants and (when available) its solution.
struct Experiment {
  std::unique_ptr<Problem> problem;
  double l0 = 0.0;  // unregularized smoothness (logistic only)
  std::optional<ReferenceSolution> reference;
  std::string reference_error;
};

Experiment BuildExperiment(const ExperimentConfig& config);

// One RunConfig per listed algorithm, all defaults filled in and validated.
// The seed field is left at 0.
std::vector<RunConfig> Resolve(const ExperimentConfig& config, const Problem& problem);

struct RunRow {
  std::int64_t t = 0;
  std::int64_t rounds = 0;
  std::int64_t upcom = 0;
  std::int64_t downcom = 0;
  double totalcom = 0.0;
  std::optional<double> gap;
  std::optional<double> psi;
  std::optional<double> ergodic_metric;
};

struct RunRecord {
  RunConfig config;
  std::vector<RunRow> rows;
  CommLedger ledger;
  std::int64_t iterations_run = 0;
  bool stopped_early = false;
  std::optional<double> final_gap;
  std::string error;
};

struct RunOptions {
  int log_every = 1;
  std::optional<double> gap_target;
  // Called after every iteration.
  std::function<void(const Simulator&)> observer;
};

// Deterministic single run. Rows are logged at t = 0, at communication
// rounds (every log_every-th) and at the final iterate.
RunRecord ExecuteRun(const Problem& problem, const RunConfig& config,
                     const ReferenceSolution* reference, const RunOptions& options);

// Columns: t,rounds,upcom,downcom,totalcom,gap,psi,ergodic_metric
inline constexpr std::string_view kCsvHeader =
    "t,rounds,upcom,downcom,totalcom,gap,psi,ergodic_metric";
std::string FormatCsv(const RunRecord& record);

// rounds * (ceil(s d / n) + c d)
double LedgerPrediction(const CommLedger& ledger, int n, int d, int s);

struct ExperimentResult {
  nlohmann::json summary;
  std::vector<std::string> csv_paths;
  bool all_ok = true;
};

// Builds, resolves, runs every (algorithm, seed) pair and writes one CSV per
// run plus summary.json into output_dir. The CSCAFFNEW_OUTPUT_DIR
// environment variable overrides output_dir.
ExperimentResult RunExperiment(const ExperimentConfig& config);

nlohmann::json TuningReportJson(const TuningReport& report);

}  // namespace cscaffnew

#endif  // CSCAFFNEW_HARNESS_H_
