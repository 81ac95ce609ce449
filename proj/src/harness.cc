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
#include "cscaffnew/harness.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "cscaffnew/dataio.h"
#include "cscaffnew/errors.h"
#include "cscaffnew/tuning.h"

namespace cscaffnew {

namespace {

using nlohmann::json;

void RejectUnknownKeys(const json& object, std::initializer_list<std::string_view> allowed,
                       const std::string& context) {
  if (!object.is_object()) throw ConfigError(context + ": expected an object");
  for (const auto& [key, value] : object.items()) {
    bool known = false;
    for (std::string_view name : allowed) known = known || key == name;
    if (!known) throw ConfigError(context + ": unknown key '" + key + "'");
  }
}

template <typename T>
T Get(const json& object, const char* key, const std::string& context) {
  if (!object.contains(key)) {
    throw ConfigError(context + ": missing required key '" + key + "'");
  }
  try {
    return object.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(context + ": bad value for '" + key + "': " + e.what());
  }
}

template <typename T>
std::optional<T> GetOptional(const json& object, const char* key, const std::string& context) {
  if (!object.contains(key)) return std::nullopt;
  return Get<T>(object, key, context);
}

DatasetSpec ParseDataset(const json& node, const std::string& base_dir) {
  const std::string context = "dataset";
  const auto kind = Get<std::string>(node, "kind", context);
  DatasetSpec spec;
  if (kind == "libsvm") {
    RejectUnknownKeys(node, {"kind", "path"}, context);
    spec.kind = DatasetSpec::Kind::kFile;
    spec.path = Get<std::string>(node, "path", context);
    const std::filesystem::path path(spec.path);
    if (path.is_relative() && !base_dir.empty()) {
      spec.path = (std::filesystem::path(base_dir) / path).string();
    }
  } else if (kind == "quadratic") {
    RejectUnknownKeys(node, {"kind", "dimension", "seed"}, context);
    spec.kind = DatasetSpec::Kind::kQuadratic;
    spec.dimension = Get<int>(node, "dimension", context);
    spec.seed = GetOptional<std::uint64_t>(node, "seed", context).value_or(0);
    if (spec.dimension < 1) throw ConfigError("dataset: dimension must be >= 1");
  } else if (kind == "logistic") {
    RejectUnknownKeys(node,
                      {"kind", "samples", "dimension", "feature_decay", "label_noise",
                       "weight_scale", "seed"},
                      context);
    spec.kind = DatasetSpec::Kind::kLogistic;
    LogisticDataOptions& o = spec.logistic;
    o.samples = Get<int>(node, "samples", context);
    o.dimension = Get<int>(node, "dimension", context);
    o.feature_decay = GetOptional<double>(node, "feature_decay", context).value_or(1.0);
    o.label_noise = GetOptional<double>(node, "label_noise", context).value_or(0.1);
    o.weight_scale = GetOptional<double>(node, "weight_scale", context).value_or(1.0);
    spec.seed = GetOptional<std::uint64_t>(node, "seed", context).value_or(0);
  } else if (kind == "w8a_like") {
    RejectUnknownKeys(node, {"kind", "samples", "seed", "group_by_label"}, context);
    spec.kind = DatasetSpec::Kind::kW8aLike;
    spec.samples = GetOptional<int>(node, "samples", context).value_or(49749);
    spec.group_by_label = GetOptional<bool>(node, "group_by_label", context).value_or(true);
    spec.seed = GetOptional<std::uint64_t>(node, "seed", context).value_or(0);
  } else {
    throw ConfigError("dataset: unknown kind '" + kind + "'");
  }
  return spec;
}

std::string FormatNumber(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string FormatOptional(const std::optional<double>& value) {
  return value ? FormatNumber(*value) : std::string();
}

json OptionalJson(const std::optional<double>& value) {
  return value ? json(*value) : json(nullptr);
}

}  // namespace

ExperimentConfig ParseExperimentConfig(std::string_view json_text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  const std::string context = "config";
  RejectUnknownKeys(root,
                    {"name", "dataset", "clients", "mu", "algorithms", "c", "gamma", "p", "eta",
                     "tau", "s", "iterations", "seeds", "output_dir", "log_every",
                     "gap_target"},
                    context);
  ExperimentConfig config;
  config.name = GetOptional<std::string>(root, "name", context).value_or(config.name);
  if (!root.contains("dataset")) throw ConfigError("config: missing required key 'dataset'");
  config.dataset = ParseDataset(root.at("dataset"), base_dir);
  config.clients = Get<int>(root, "clients", context);
  if (config.clients < 2) throw ConfigError("config: clients must be >= 2");

  if (root.contains("mu")) {
    const json& mu = root.at("mu");
    RejectUnknownKeys(mu, {"absolute", "factor_of_l0"}, "mu");
    if (mu.size() != 1) throw ConfigError("mu: give exactly one of 'absolute', 'factor_of_l0'");
    MuRule rule;
    rule.relative_to_l0 = mu.contains("factor_of_l0");
    rule.value = Get<double>(mu, rule.relative_to_l0 ? "factor_of_l0" : "absolute", "mu");
    if (!(rule.value >= 0.0)) throw ConfigError("mu: must be nonnegative");
    config.mu = rule;
  }

  for (const auto& name : Get<std::vector<std::string>>(root, "algorithms", context)) {
    config.algorithms.push_back(ParseAlgorithm(name));
  }
  if (config.algorithms.empty()) throw ConfigError("config: 'algorithms' is empty");
  config.c = GetOptional<double>(root, "c", context).value_or(0.0);
  config.gamma = GetOptional<double>(root, "gamma", context);
  config.p = GetOptional<double>(root, "p", context);
  config.eta = GetOptional<double>(root, "eta", context);
  config.tau = GetOptional<double>(root, "tau", context);
  config.s = GetOptional<int>(root, "s", context);
  config.iterations = Get<std::int64_t>(root, "iterations", context);
  if (config.iterations < 0) throw ConfigError("config: iterations must be >= 0");
  if (root.contains("seeds")) {
    config.seeds = Get<std::vector<std::uint64_t>>(root, "seeds", context);
    if (config.seeds.empty()) throw ConfigError("config: 'seeds' is empty");
  }
  config.output_dir = GetOptional<std::string>(root, "output_dir", context).value_or("out");
  config.log_every = GetOptional<int>(root, "log_every", context).value_or(1);
  if (config.log_every < 1) throw ConfigError("config: log_every must be >= 1");
  config.gap_target = GetOptional<double>(root, "gap_target", context);
  if (!(config.c >= 0.0 && config.c <= 1.0)) throw ConfigError("config: violated 0 <= c <= 1");

  const bool quadratic = config.dataset.kind == DatasetSpec::Kind::kQuadratic;
  if (quadratic && config.mu) {
    throw ConfigError("config: 'mu' does not apply to the quadratic problem (mu = L = 1)");
  }
  if (!quadratic && !config.mu) throw ConfigError("config: missing required key 'mu'");
  return config;
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseExperimentConfig(buffer.str(),
                               std::filesystem::path(path).parent_path().string());
}

Experiment BuildExperiment(const ExperimentConfig& config) {
  Experiment experiment;
  const DatasetSpec& spec = config.dataset;
  if (spec.kind == DatasetSpec::Kind::kQuadratic) {
    auto problem = std::make_unique<QuadraticProblem>(
        RandomQuadraticTargets(spec.dimension, config.clients, spec.seed));
    experiment.reference = ExactReference(*problem);
    experiment.problem = std::move(problem);
    return experiment;
  }

  Dataset data;
  switch (spec.kind) {
    case DatasetSpec::Kind::kFile:
      data = ReadLibsvmFile(spec.path);
      break;
    case DatasetSpec::Kind::kLogistic:
      data = SyntheticLogisticData(spec.logistic, spec.seed);
      break;
    case DatasetSpec::Kind::kW8aLike:
      data = W8aLikeData(spec.seed, spec.samples, spec.group_by_label);
      break;
    case DatasetSpec::Kind::kQuadratic:
      break;
  }
  const ShardedDataset shards = Shard(data, static_cast<std::size_t>(config.clients));
  experiment.l0 = SmoothnessConstant(shards);
  const double mu = config.mu->relative_to_l0 ? config.mu->value * experiment.l0 : config.mu->value;
  experiment.problem = std::make_unique<LogisticProblem>(shards, mu, experiment.l0);
  try {
    experiment.reference = ReferenceSolve(*experiment.problem);
  } catch (const ConvergenceError& e) {
    experiment.reference_error = e.what();
  }
  return experiment;
}

std::vector<RunConfig> Resolve(const ExperimentConfig& config, const Problem& problem) {
  const int n = problem.client_count();
  const int d = problem.dimension();
  const double l = problem.smoothness();
  const double mu = problem.strong_convexity();
  const double kappa = problem.condition_number();
  const bool convex = mu == 0.0;

  std::vector<RunConfig> resolved;
  for (Algorithm algorithm : config.algorithms) {
    RunConfig run;
    run.algorithm = algorithm;
    run.c = config.c;
    run.iterations = config.iterations;
    run.gamma = config.gamma.value_or(2.0 / (l + mu) * (1.0 - 1e-9));
    switch (algorithm) {
      case Algorithm::kGradientDescent:
        run.p = 1.0;
        run.s = n;
        run.eta = 1.0;
        break;
      case Algorithm::kScaffnew:
        run.s = n;
        run.eta = 1.0;
        run.p = config.p ? *config.p : PScaffnew(kappa);
        break;
      case Algorithm::kCompressedScaffnew:
      case Algorithm::kDualForm:
        run.s = config.s.value_or(SRec(n, d, config.c));
        if (run.s < 2 || run.s > n) {
          throw ConfigError("violated 2 <= s <= n (s=" + std::to_string(run.s) + ")");
        }
        run.eta = config.eta.value_or(convex ? 0.9 * EtaRec(n, run.s) : EtaRec(n, run.s));
        run.p = config.p ? *config.p : PRec(n, run.s, kappa);
        if (algorithm == Algorithm::kDualForm) run.tau = config.tau;
        break;
    }
    ValidateRunConfig(run, problem);
    resolved.push_back(run);
  }
  return resolved;
}

RunRecord ExecuteRun(const Problem& problem, const RunConfig& config,
                     const ReferenceSolution* reference, const RunOptions& options) {
  RunRecord record;
  record.config = config;
  const bool convex = problem.strong_convexity() == 0.0;
  const int n = problem.client_count();
  try {
    Simulator simulator(problem, config);
    record.config = simulator.config();
    const RunConfig& cfg = record.config;
    const bool has_psi = !convex && reference != nullptr &&
                         cfg.algorithm != Algorithm::kGradientDescent;
    std::optional<ErgodicState> ergodic;
    if (convex) {
      ergodic.emplace(problem.dimension(), n);
      ergodic->Add(simulator.state().x);
    }

    auto server_model = [&]() -> Vector {
      const WorldState& state = simulator.state();
      return simulator.ledger().rounds > 0 ? state.x_bar_last
                                           : Vector(state.x.rowwise().mean());
    };
    auto gap_now = [&]() -> std::optional<double> {
      if (reference == nullptr) return std::nullopt;
      return ObjectiveGap(problem, server_model(), *reference);
    };
    auto make_row = [&](std::optional<double> gap) {
      const CommLedger& ledger = simulator.ledger();
      RunRow row;
      row.t = simulator.state().t;
      row.rounds = ledger.rounds;
      row.upcom = ledger.upcom;
      row.downcom = ledger.downcom;
      row.totalcom = ledger.totalcom();
      row.gap = gap;
      if (has_psi) {
        row.psi = Lyapunov(simulator.state(), *reference, cfg.gamma, cfg.p, cfg.eta, n, cfg.s);
      }
      if (ergodic) row.ergodic_metric = ErgodicGradMetric(*ergodic, problem);
      record.rows.push_back(row);
    };

    make_row(gap_now());
    for (std::int64_t it = 0; it < cfg.iterations; ++it) {
      const bool communicated = simulator.Step();
      if (ergodic) ergodic->Add(simulator.state().x);
      if (options.observer) options.observer(simulator);
      if (!communicated) continue;
      std::optional<double> gap;
      bool reached = false;
      if (options.gap_target) {
        gap = gap_now();
        reached = gap && *gap <= *options.gap_target;
      }
      if (reached || simulator.ledger().rounds % options.log_every == 0) {
        if (!gap) gap = gap_now();
        make_row(gap);
      }
      if (reached) {
        record.stopped_early = true;
        break;
      }
    }
    if (record.rows.back().t != simulator.state().t) make_row(gap_now());
    record.ledger = simulator.ledger();
    record.iterations_run = simulator.state().t;
    record.final_gap = record.rows.back().gap;
  } catch (const std::exception& e) {
    record.error = e.what();
  }
  return record;
}

std::string FormatCsv(const RunRecord& record) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const RunRow& row : record.rows) {
    out << row.t << ',' << row.rounds << ',' << row.upcom << ',' << row.downcom << ','
        << FormatNumber(row.totalcom) << ',' << FormatOptional(row.gap) << ','
        << FormatOptional(row.psi) << ',' << FormatOptional(row.ergodic_metric) << '\n';
  }
  return out.str();
}

double LedgerPrediction(const CommLedger& ledger, int n, int d, int s) {
  const long long sd = static_cast<long long>(s) * d;
  const double per_round = static_cast<double>((sd + n - 1) / n) + ledger.c * d;
  return static_cast<double>(ledger.rounds) * per_round;
}

nlohmann::json TuningReportJson(const TuningReport& r) {
  return json{{"n", r.n},
              {"d", r.d},
              {"kappa", r.kappa},
              {"c", r.c},
              {"s_rec", r.s_rec},
              {"p_rec", r.p_rec},
              {"eta_rec", r.eta_rec},
              {"iter_factor", r.iter_factor},
              {"upcom_factor", r.upcom_factor},
              {"upcom_factor_slack", r.upcom_factor_slack},
              {"downcom_factor", r.downcom_factor},
              {"totalcom_factor", r.totalcom_factor},
              {"gamma_times_L", r.gamma},
              {"rho", r.rho},
              {"rho_sharp", r.rho_sharp}};
}

ExperimentResult RunExperiment(const ExperimentConfig& config) {
  ExperimentResult result;
  Experiment experiment = BuildExperiment(config);
  const Problem& problem = *experiment.problem;
  const std::vector<RunConfig> resolved = Resolve(config, problem);

  std::string output_dir = config.output_dir;
  if (const char* env = std::getenv("CSCAFFNEW_OUTPUT_DIR"); env != nullptr && *env != '\0') {
    output_dir = env;
  }
  std::filesystem::create_directories(output_dir);

  const int n = problem.client_count();
  const int d = problem.dimension();
  const double mu = problem.strong_convexity();
  const double kappa = problem.condition_number();
  const bool convex = mu == 0.0;
  const ReferenceSolution* reference = experiment.reference ? &*experiment.reference : nullptr;

  json summary;
  summary["name"] = config.name;
  json problem_json{{"n", n},
                    {"d", d},
                    {"L", problem.smoothness()},
                    {"mu", mu},
                    {"kappa", convex ? json(nullptr) : json(kappa)},
                    {"L0", experiment.l0}};
  if (reference != nullptr) {
    problem_json["reference"] = {{"f", reference->f},
                                 {"residual", reference->residual},
                                 {"iterations", reference->iterations}};
  } else {
    problem_json["reference_error"] = experiment.reference_error;
    result.all_ok = false;
  }
  summary["problem"] = problem_json;
  if (!convex) summary["tuning"] = TuningReportJson(Tune(n, d, kappa, config.c));

  json runs = json::array();
  for (const RunConfig& base : resolved) {
    for (std::uint64_t seed : config.seeds) {
      RunConfig run = base;
      run.seed = seed;
      const RunRecord record =
          ExecuteRun(problem, run, reference, RunOptions{config.log_every, config.gap_target, {}});
      const RunConfig& cfg = record.config;
      const std::string file =
          std::string(AlgorithmName(cfg.algorithm)) + "_seed" + std::to_string(seed) + ".csv";
      const std::string path = (std::filesystem::path(output_dir) / file).string();
      {
        std::ofstream out(path, std::ios::binary);
        out << FormatCsv(record);
        if (!out) throw Error("cannot write '" + path + "'");
      }
      result.csv_paths.push_back(path);

      json entry{{"algorithm", AlgorithmName(cfg.algorithm)},
                 {"seed", seed},
                 {"csv", file},
                 {"gamma", cfg.gamma},
                 {"p", cfg.p},
                 {"eta", cfg.eta},
                 {"s", cfg.s},
                 {"c", cfg.c},
                 {"iterations_budget", cfg.iterations},
                 {"iterations_run", record.iterations_run},
                 {"stopped_early", record.stopped_early},
                 {"gap_target", OptionalJson(config.gap_target)},
                 {"final_gap", OptionalJson(record.final_gap)},
                 {"rounds", record.ledger.rounds},
                 {"upcom", record.ledger.upcom},
                 {"downcom", record.ledger.downcom},
                 {"totalcom", record.ledger.totalcom()},
                 {"totalcom_predicted", LedgerPrediction(record.ledger, n, d, cfg.s)}};
      if (cfg.algorithm == Algorithm::kDualForm) entry["tau"] = cfg.DualStep();
      if (!convex) {
        entry["rho"] = RateRho(cfg.gamma, mu, problem.smoothness(), cfg.p, cfg.eta, cfg.s, n);
        entry["rho_sharp"] = RhoSharp(cfg.gamma, mu, problem.smoothness());
        const ComplexityFactors f = ComputeComplexityFactors(n, d, cfg.s, cfg.p, kappa, cfg.c);
        entry["predicted"] = {{"iter_factor", f.iter_factor},
                              {"upcom_factor", f.upcom_factor},
                              {"downcom_factor", f.downcom_factor},
                              {"totalcom_factor", f.totalcom_factor}};
      } else if (reference != nullptr && cfg.algorithm != Algorithm::kGradientDescent &&
                 cfg.eta < 1.0 - AggregationVarianceFactor(n, cfg.s) &&
                 !record.rows.empty()) {
        const WorldState start = WorldState::Zero(d, n);
        const double psi0 = Lyapunov(start, *reference, cfg.gamma, cfg.p, cfg.eta, n, cfg.s);
        entry["ergodic_bound"] = ErgodicBound(problem.smoothness(), cfg.gamma, cfg.p, cfg.eta, n,
                                              cfg.s, psi0, record.iterations_run);
      }
      if (!record.error.empty()) {
        entry["error"] = record.error;
        result.all_ok = false;
      }
      runs.push_back(entry);
    }
  }
  summary["runs"] = runs;

  const std::string summary_path = (std::filesystem::path(output_dir) / "summary.json").string();
  std::ofstream out(summary_path, std::ios::binary);
  out << summary.dump(2) << '\n';
  if (!out) throw Error("cannot write '" + summary_path + "'");
  result.summary = std::move(summary);
  return result;
}

}  // namespace cscaffnew
