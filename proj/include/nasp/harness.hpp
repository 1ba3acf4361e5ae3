// Copyright 2026 The nasp Authors.
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

#pragma once

// Experiment orchestration: configuration, the label -> train -> search ->
// revalidate predictor pipeline, run summaries and speedup comparison.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "nasp/cellspace.hpp"
#include "nasp/evolution.hpp"
#include "nasp/fitness.hpp"
#include "nasp/oracle.hpp"
#include "nasp/predictor.hpp"
#include "nasp/reinforce.hpp"
#include "nasp/trace.hpp"

namespace nasp {

enum class Algo { kEvolution, kReinforce };

std::string_view algo_name(Algo algo);
Algo algo_from_name(std::string_view name);
EvalMode eval_mode_from_name(std::string_view name);

struct ExperimentConfig {
  Algo algo = Algo::kEvolution;
  EvalMode fitness = EvalMode::kOracle;
  SpaceLimits limits{5, 9};
  // Empty means the synthetic benchmark.
  std::string oracle_file;
  SyntheticOracleParams synthetic{};
  std::size_t n_label = 400;
  double label_charge = 1.0;
  // Overrides the default label threshold (0.90 for tables, the 90th
  // percentile of the space for the synthetic benchmark).
  std::optional<double> label_threshold;
  double train_fraction = 0.8;
  double min_positive_fraction = 0.2;
  std::size_t top_k = 10;
  std::vector<std::uint64_t> seeds{0};

  EvolutionConfig evolution{};
  ReinforceConfig reinforce{};
  TrainConfig predictor{};

  // Throws ConfigError on an inconsistent configuration.
  void check() const;
  nlohmann::json to_json() const;
  // Missing keys keep their defaults.
  static ExperimentConfig from_json(const nlohmann::json& j);
};

Oracle make_oracle(const ExperimentConfig& cfg);

// Optimum and label threshold of a space, from exhaustive enumeration when
// max_vertices allows it, from the table for file oracles, and otherwise from
// a fixed random sample.
struct SpaceFacts {
  std::optional<ModelSpec> best_spec;
  CanonicalHash best_hash{};
  double best_accuracy = kUnknown;
  bool best_unique = false;
  std::size_t classes = 0;  // 0 when not enumerated
  double label_threshold = kDefaultLabelThreshold;
  std::string threshold_source;
};

SpaceFacts describe_space(const Oracle& oracle, const SpaceLimits& limits,
                          std::optional<double> threshold_override = std::nullopt);

// Oracle queries already paid for within one run, as a fraction of full
// training. Lets revalidation top up instead of paying twice.
using PaidCharges = std::unordered_map<CanonicalHash, double, CanonicalHashHasher>;

struct PipelineReport {
  TrainedPredictor predictor;
  LabeledDataset train_set;    // after positive oversampling
  LabeledDataset heldout_set;
  std::size_t labels = 0;
  std::size_t positives = 0;
  bool positive_shortfall = false;  // fewer than min_positive_fraction positives drawn
  double heldout_accuracy = 0.0;
  double label_cost_s = 0.0;
  double final_train_loss = kUnknown;
  std::optional<ModelSpec> best_labeled_spec;
  double best_labeled_accuracy = kUnknown;
};

struct SplitResult {
  LabeledDataset train;    // after positive oversampling
  LabeledDataset heldout;
  bool positive_shortfall = false;
};

// Per-class split at train_fraction (rounded), then positives in the train
// split are repeated round-robin until they make up min_positive_fraction.
SplitResult stratified_split(std::vector<LabeledSpec> items, double train_fraction,
                             double min_positive_fraction, Rng& rng);

// Label n_label distinct random architectures against the oracle (charging
// label_charge each), then train the predictor on a stratified split. Trace
// rows are appended for every label when trace is non-null.
PipelineReport run_predictor_pipeline(const ExperimentConfig& cfg, const Oracle& oracle,
                                      double threshold, SimClock& clock, Rng& rng,
                                      SearchTrace* trace = nullptr, PaidCharges* paid = nullptr);

struct Revalidation {
  std::optional<ModelSpec> best_spec;
  double best_true_acc = kUnknown;
  std::size_t queries = 0;
  double cost_s = 0.0;
};

// Queries ground truth for the k highest-fitness distinct architectures in
// `scored` (clamped to what is available); first occurrence wins ties.
Revalidation topk_revalidate(const std::vector<std::pair<ModelSpec, double>>& scored,
                             std::size_t k, const Oracle& oracle, SimClock& clock,
                             SearchTrace* trace = nullptr, PaidCharges* paid = nullptr);

struct RunSummary {
  std::string algo;
  std::string fitness;
  std::uint64_t seed = 0;
  std::optional<ModelSpec> best_spec;
  double best_true_acc = kUnknown;
  double best_fitness = kUnknown;
  double total_sim_seconds = 0.0;
  std::size_t evaluations = 0;
  std::size_t labels = 0;
  std::size_t invalid_samples = 0;
  std::size_t memo_hits = 0;
  std::size_t revalidations = 0;
  double target_accuracy = kUnknown;
  std::optional<double> time_to_target_s;
  nlohmann::json extra = nlohmann::json::object();
  nlohmann::json config = nlohmann::json::object();

  nlohmann::json to_json() const;
  static RunSummary from_json(const nlohmann::json& j);
};

struct RunOutput {
  RunSummary summary;
  SearchTrace trace;
  std::vector<Individual> evolution_history;  // evolution runs only
  std::optional<TrainedPredictor> predictor;  // predictor runs only
};

// One experiment for one seed. facts supplies the optimum (target) and label
// threshold; compute it once with describe_space and share across seeds.
RunOutput run_experiment(const ExperimentConfig& cfg, std::uint64_t seed, const Oracle& oracle,
                         const SpaceFacts& facts);

// Throws NaspError if the trace is not monotone or the summary disagrees with
// its final row.
void check_consistency(const RunSummary& summary, const SearchTrace& trace);

// Writes trace_seed<N>.csv, summary_seed<N>.json and, when present,
// history_seed<N>.jsonl / predictor_seed<N>.json into dir.
void write_run(const std::string& dir, const RunOutput& out);

enum class CompareStatus { kOk, kNoCommonTarget };

struct SpeedupReport {
  CompareStatus status = CompareStatus::kNoCommonTarget;
  double speedup = kUnknown;  // time_a / time_b
  double time_a = kUnknown;
  double time_b = kUnknown;
  double target = kUnknown;

  std::string to_line() const;
};

SpeedupReport compare_runs(const RunSummary& a, const RunSummary& b);

}  // namespace nasp
