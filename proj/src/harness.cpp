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

#include "nasp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "nasp/errors.hpp"

namespace nasp {
namespace {

nlohmann::json num_or_null(double x) { return std::isnan(x) ? nlohmann::json(nullptr) : nlohmann::json(x); }

double num_or_nan(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return kUnknown;
  return j.at(key).get<double>();
}

constexpr std::size_t kThresholdSample = 20'000;

}  // namespace

std::string_view algo_name(Algo algo) { return algo == Algo::kEvolution ? "evolution" : "reinforce"; }

Algo algo_from_name(std::string_view name) {
  if (name == "evolution") return Algo::kEvolution;
  if (name == "reinforce") return Algo::kReinforce;
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

EvalMode eval_mode_from_name(std::string_view name) {
  if (name == "oracle") return EvalMode::kOracle;
  if (name == "predictor") return EvalMode::kPredictor;
  throw ConfigError("unknown fitness mode '" + std::string(name) + "'");
}

void ExperimentConfig::check() const {
  limits.check();
  if (fitness == EvalMode::kPredictor && n_label == 0) {
    throw ConfigError("predictor fitness needs n_label > 0");
  }
  if (!(label_charge >= 0.0 && label_charge <= 1.0)) throw ConfigError("label_charge must lie in [0, 1]");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("train_fraction must lie in (0, 1)");
  if (!(min_positive_fraction >= 0.0 && min_positive_fraction < 1.0)) {
    throw ConfigError("min_positive_fraction must lie in [0, 1)");
  }
  if (top_k == 0) throw ConfigError("top_k must be >= 1");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (algo == Algo::kEvolution) {
    EvolutionConfig e = evolution;
    e.limits = limits;
    e.check();
  } else if (reinforce.batch == 0) {
    throw ConfigError("reinforce batch must be >= 1");
  }
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j = {{"algo", std::string(algo_name(algo))},
                      {"fitness", std::string(eval_mode_name(fitness))},
                      {"limits", {limits.max_vertices, limits.max_edges}},
                      {"oracle", oracle_file.empty() ? "synthetic" : oracle_file},
                      {"synthetic", synthetic.to_json()},
                      {"n_label", n_label},
                      {"label_charge", label_charge},
                      {"label_threshold", label_threshold ? nlohmann::json(*label_threshold) : nlohmann::json(nullptr)},
                      {"train_fraction", train_fraction},
                      {"min_positive_fraction", min_positive_fraction},
                      {"top_k", top_k},
                      {"seeds", seeds},
                      {"evolution", evolution.to_json()},
                      {"reinforce", reinforce.to_json()},
                      {"predictor", predictor.to_json()}};
  j["evolution"].erase("limits");
  j["evolution"].erase("seed");
  j["reinforce"].erase("limits");
  j["reinforce"].erase("seed");
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    if (j.contains("algo")) c.algo = algo_from_name(j.at("algo").get<std::string>());
    if (j.contains("fitness")) c.fitness = eval_mode_from_name(j.at("fitness").get<std::string>());
    if (j.contains("limits")) {
      c.limits.max_vertices = j.at("limits").at(0).get<int>();
      c.limits.max_edges = j.at("limits").at(1).get<int>();
    }
    if (j.contains("oracle")) {
      const auto src = j.at("oracle").get<std::string>();
      c.oracle_file = src == "synthetic" ? "" : src;
    }
    if (j.contains("synthetic")) c.synthetic = SyntheticOracleParams::from_json(j.at("synthetic"));
    c.n_label = j.value("n_label", c.n_label);
    c.label_charge = j.value("label_charge", c.label_charge);
    if (j.contains("label_threshold") && !j.at("label_threshold").is_null()) {
      c.label_threshold = j.at("label_threshold").get<double>();
    }
    c.train_fraction = j.value("train_fraction", c.train_fraction);
    c.min_positive_fraction = j.value("min_positive_fraction", c.min_positive_fraction);
    c.top_k = j.value("top_k", c.top_k);
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("evolution")) c.evolution = EvolutionConfig::from_json(j.at("evolution"));
    if (j.contains("reinforce")) c.reinforce = ReinforceConfig::from_json(j.at("reinforce"));
    if (j.contains("predictor")) c.predictor = TrainConfig::from_json(j.at("predictor"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

Oracle make_oracle(const ExperimentConfig& cfg) {
  if (cfg.oracle_file.empty()) return Oracle::synthetic(cfg.synthetic);
  return Oracle::from_table(load_table(cfg.oracle_file));
}

SpaceFacts describe_space(const Oracle& oracle, const SpaceLimits& limits,
                          std::optional<double> threshold_override) {
  SpaceFacts facts;
  if (const BenchmarkTable* table = oracle.table()) {
    if (const BenchmarkRecord* best = table->best()) {
      facts.best_hash = best->spec_hash;
      facts.best_accuracy = best->val_accuracy;
    }
    facts.classes = table->size();
    facts.label_threshold = kDefaultLabelThreshold;
    facts.threshold_source = "absolute";
  } else if (limits.max_vertices <= kMaxEnumerableVertices) {
    std::vector<double> accs;
    std::size_t ties = 0;
    enumerate_space(limits, [&](const ModelSpec& spec) {
      const BenchmarkRecord rec = oracle.lookup(spec);
      accs.push_back(rec.val_accuracy);
      if (!facts.best_spec || rec.val_accuracy > facts.best_accuracy) {
        facts.best_spec = spec;
        facts.best_hash = rec.spec_hash;
        facts.best_accuracy = rec.val_accuracy;
        ties = 1;
      } else if (rec.val_accuracy == facts.best_accuracy) {
        ++ties;
      }
    });
    facts.classes = accs.size();
    facts.best_unique = ties == 1;
    facts.label_threshold = quantile(accs, 0.9);
    facts.threshold_source = "p90-enumerated";
  } else {
    Rng rng = derive_rng(0, 0x7448);
    std::unordered_set<CanonicalHash, CanonicalHashHasher> seen;
    std::vector<double> accs;
    for (std::size_t i = 0; i < kThresholdSample; ++i) {
      const ModelSpec spec = random_spec(rng, limits);
      const BenchmarkRecord rec = oracle.lookup(spec);
      if (seen.insert(rec.spec_hash).second) accs.push_back(rec.val_accuracy);
    }
    facts.label_threshold = quantile(accs, 0.9);
    facts.threshold_source = "p90-sampled";
  }
  if (threshold_override) {
    facts.label_threshold = *threshold_override;
    facts.threshold_source = "configured";
  }
  return facts;
}

SplitResult stratified_split(std::vector<LabeledSpec> items, double train_fraction,
                             double min_positive_fraction, Rng& rng) {
  std::vector<LabeledSpec> positives;
  std::vector<LabeledSpec> negatives;
  for (auto& item : items) (item.label == 1 ? positives : negatives).push_back(std::move(item));
  auto shuffle = [&](std::vector<LabeledSpec>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
  };
  shuffle(positives);
  shuffle(negatives);
  auto cut = [&](std::size_t n) {
    return static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  };
  const std::size_t pos_train = cut(positives.size());
  const std::size_t neg_train = cut(negatives.size());

  SplitResult out;
  out.train.split = Split::kTrain;
  out.heldout.split = Split::kHeldout;
  for (std::size_t i = 0; i < positives.size(); ++i) {
    (i < pos_train ? out.train : out.heldout).items.push_back(positives[i]);
  }
  for (std::size_t i = 0; i < negatives.size(); ++i) {
    (i < neg_train ? out.train : out.heldout).items.push_back(negatives[i]);
  }
  const std::size_t total = positives.size() + negatives.size();
  out.positive_shortfall =
      total == 0 || static_cast<double>(positives.size()) / static_cast<double>(total) <
                        min_positive_fraction;
  if (pos_train > 0) {
    std::size_t next = 0;
    auto fraction = [&] {
      return static_cast<double>(out.train.positives()) /
             static_cast<double>(out.train.items.size());
    };
    while (fraction() < min_positive_fraction) out.train.items.push_back(positives[next++ % pos_train]);
  }
  return out;
}

PipelineReport run_predictor_pipeline(const ExperimentConfig& cfg, const Oracle& oracle,
                                      double threshold, SimClock& clock, Rng& rng,
                                      SearchTrace* trace, PaidCharges* paid) {
  if (cfg.n_label == 0) throw ConfigError("predictor pipeline: n_label must be > 0");
  PipelineReport report;
  const double start = clock.elapsed_s();

  // Phase 1: label distinct random architectures.
  std::unordered_set<CanonicalHash, CanonicalHashHasher> seen;
  std::vector<LabeledSpec> positives;
  std::vector<LabeledSpec> negatives;
  const std::size_t max_draws = 1000 * cfg.n_label;
  std::size_t draws = 0;
  while (report.labels < cfg.n_label) {
    if (++draws > max_draws) {
      throw ExhaustedError("predictor pipeline: space has fewer than n_label distinct architectures");
    }
    ModelSpec spec = random_spec(rng, cfg.limits);
    const CanonicalHash hash = canonical_hash(spec);
    if (!seen.insert(hash).second) continue;
    const BenchmarkRecord rec = oracle.query(spec, clock, cfg.label_charge);
    if (paid != nullptr) (*paid)[hash] = cfg.label_charge;
    ++report.labels;
    const int y = label(rec, threshold);
    if (std::isnan(report.best_labeled_accuracy) || rec.val_accuracy > report.best_labeled_accuracy) {
      report.best_labeled_accuracy = rec.val_accuracy;
      report.best_labeled_spec = spec;
    }
    if (trace != nullptr) trace->record(trace->rows().size() + 1, clock.elapsed_s(), rec.val_accuracy, kUnknown);
    (y == 1 ? positives : negatives).push_back({std::move(spec), y});
  }
  report.label_cost_s = clock.elapsed_s() - start;
  report.positives = positives.size();

  // Phase 2: stratified split, positive oversampling, training.
  std::vector<LabeledSpec> items = std::move(positives);
  items.insert(items.end(), std::make_move_iterator(negatives.begin()),
               std::make_move_iterator(negatives.end()));
  SplitResult split = stratified_split(std::move(items), cfg.train_fraction,
                                       cfg.min_positive_fraction, rng);
  report.train_set = std::move(split.train);
  report.heldout_set = std::move(split.heldout);
  report.positive_shortfall = split.positive_shortfall;

  TrainConfig tcfg = cfg.predictor;
  tcfg.seed = rng();
  TrainResult trained = train(report.train_set, tcfg);
  report.final_train_loss = trained.loss_history.back();
  report.heldout_accuracy = binary_accuracy(trained.params, report.heldout_set.items);
  report.predictor = TrainedPredictor{std::move(trained.params), threshold, tcfg.seed};
  return report;
}

Revalidation topk_revalidate(const std::vector<std::pair<ModelSpec, double>>& scored,
                             std::size_t k, const Oracle& oracle, SimClock& clock,
                             SearchTrace* trace, PaidCharges* paid) {
  if (k == 0) throw ConfigError("topk_revalidate: k must be >= 1");
  struct Candidate {
    const ModelSpec* spec;
    CanonicalHash hash;
    double fitness;
  };
  std::vector<Candidate> distinct;
  std::unordered_map<CanonicalHash, std::size_t, CanonicalHashHasher> where;
  for (const auto& [spec, fitness] : scored) {
    const CanonicalHash hash = canonical_hash(spec);
    const auto [it, fresh] = where.emplace(hash, distinct.size());
    if (fresh) {
      distinct.push_back({&spec, hash, fitness});
    } else {
      distinct[it->second].fitness = std::max(distinct[it->second].fitness, fitness);
    }
  }
  std::stable_sort(distinct.begin(), distinct.end(),
                   [](const Candidate& a, const Candidate& b) { return a.fitness > b.fitness; });
  distinct.resize(std::min(k, distinct.size()));

  Revalidation out;
  const double start = clock.elapsed_s();
  for (const auto& cand : distinct) {
    double charge = 1.0;
    if (paid != nullptr) {
      const auto it = paid->find(cand.hash);
      if (it != paid->end()) charge = std::max(0.0, 1.0 - it->second);
      (*paid)[cand.hash] = 1.0;
    }
    const BenchmarkRecord rec = oracle.query(*cand.spec, clock, charge);
    ++out.queries;
    if (std::isnan(out.best_true_acc) || rec.val_accuracy > out.best_true_acc) {
      out.best_true_acc = rec.val_accuracy;
      out.best_spec = *cand.spec;
    }
    if (trace != nullptr) trace->record(trace->rows().size() + 1, clock.elapsed_s(), rec.val_accuracy, kUnknown);
  }
  out.cost_s = clock.elapsed_s() - start;
  return out;
}

nlohmann::json RunSummary::to_json() const {
  nlohmann::json best = nullptr;
  if (best_spec) {
    best = {{"spec", spec_to_json(*best_spec)},
            {"hash", canonical_hash(*best_spec).hex()},
            {"true_accuracy", num_or_null(best_true_acc)},
            {"fitness", num_or_null(best_fitness)}};
  }
  return {{"algo", algo},
          {"fitness", fitness},
          {"seed", seed},
          {"best", best},
          {"best_true_accuracy", num_or_null(best_true_acc)},
          {"best_fitness", num_or_null(best_fitness)},
          {"total_sim_seconds", total_sim_seconds},
          {"counts",
           {{"evaluations", evaluations},
            {"labels", labels},
            {"invalid_samples", invalid_samples},
            {"memo_hits", memo_hits},
            {"revalidations", revalidations}}},
          {"target_accuracy", num_or_null(target_accuracy)},
          {"time_to_target_s", time_to_target_s ? nlohmann::json(*time_to_target_s) : nlohmann::json(nullptr)},
          {"extra", extra},
          {"config", config}};
}

RunSummary RunSummary::from_json(const nlohmann::json& j) {
  RunSummary s;
  try {
    s.algo = j.at("algo").get<std::string>();
    s.fitness = j.at("fitness").get<std::string>();
    s.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("best").is_null()) s.best_spec = spec_from_json(j.at("best").at("spec"));
    s.best_true_acc = num_or_nan(j, "best_true_accuracy");
    s.best_fitness = num_or_nan(j, "best_fitness");
    s.total_sim_seconds = j.at("total_sim_seconds").get<double>();
    const auto& c = j.at("counts");
    s.evaluations = c.at("evaluations").get<std::size_t>();
    s.labels = c.at("labels").get<std::size_t>();
    s.invalid_samples = c.at("invalid_samples").get<std::size_t>();
    s.memo_hits = c.at("memo_hits").get<std::size_t>();
    s.revalidations = c.at("revalidations").get<std::size_t>();
    s.target_accuracy = num_or_nan(j, "target_accuracy");
    if (!j.at("time_to_target_s").is_null()) s.time_to_target_s = j.at("time_to_target_s").get<double>();
    s.extra = j.value("extra", nlohmann::json::object());
    s.config = j.value("config", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, std::string("summary: ") + e.what());
  }
  return s;
}

RunOutput run_experiment(const ExperimentConfig& cfg, std::uint64_t seed, const Oracle& oracle,
                         const SpaceFacts& facts) {
  cfg.check();
  RunOutput out;
  RunSummary& s = out.summary;
  s.algo = algo_name(cfg.algo);
  s.fitness = eval_mode_name(cfg.fitness);
  s.seed = seed;
  s.config = cfg.to_json();
  s.target_accuracy = facts.best_accuracy;
  s.extra["label_threshold"] = facts.label_threshold;
  s.extra["threshold_source"] = facts.threshold_source;
  if (facts.classes > 0) s.extra["space_classes"] = facts.classes;
  if (!std::isnan(facts.best_accuracy)) s.extra["optimum_hash"] = facts.best_hash.hex();

  SimClock clock;
  Rng rng = derive_rng(seed, 0x5eed);
  EvolutionConfig ecfg = cfg.evolution;
  ecfg.seed = seed;
  ecfg.limits = cfg.limits;
  ReinforceConfig rcfg = cfg.reinforce;
  rcfg.seed = seed;
  rcfg.limits = cfg.limits;

  auto take_best_true = [&](const std::optional<ModelSpec>& spec, double acc) {
    if (spec && !std::isnan(acc) && (std::isnan(s.best_true_acc) || acc > s.best_true_acc)) {
      s.best_true_acc = acc;
      s.best_spec = spec;
    }
  };

  if (cfg.fitness == EvalMode::kOracle) {
    OracleFitness fit(oracle, /*memoize=*/cfg.algo == Algo::kEvolution);
    if (cfg.algo == Algo::kEvolution) {
      EvolutionResult res = run_evolution(ecfg, fit, clock);
      out.trace = std::move(res.trace);
      take_best_true(res.best.spec, res.best.true_accuracy.value_or(kUnknown));
      s.best_fitness = res.best.fitness;
      out.evolution_history = std::move(res.history);
    } else {
      ReinforceResult res = run_reinforce(rcfg, fit, clock);
      out.trace = std::move(res.trace);
      take_best_true(res.best_true_spec, res.best_true_acc);
      s.best_fitness = res.best_fitness;
      s.invalid_samples = res.invalid_samples;
      s.extra["samples"] = res.samples;
      s.extra["final_baseline"] = res.baseline.value;
    }
    s.evaluations = fit.evaluations();
    s.memo_hits = fit.memo_hits();
    s.extra["memoized"] = cfg.algo == Algo::kEvolution;
  } else {
    PaidCharges paid;
    PipelineReport pipe =
        run_predictor_pipeline(cfg, oracle, facts.label_threshold, clock, rng, &out.trace, &paid);
    s.labels = pipe.labels;
    take_best_true(pipe.best_labeled_spec, pipe.best_labeled_accuracy);
    s.extra["predictor"] = {{"heldout_accuracy", pipe.heldout_accuracy},
                            {"positives", pipe.positives},
                            {"positive_shortfall", pipe.positive_shortfall},
                            {"train_items", pipe.train_set.items.size()},
                            {"heldout_items", pipe.heldout_set.items.size()},
                            {"final_train_loss", pipe.final_train_loss},
                            {"label_cost_s", pipe.label_cost_s},
                            {"train_seed", pipe.predictor.train_seed}};

    PredictorFitness fit(pipe.predictor.params);
    std::vector<std::pair<ModelSpec, double>> scored;
    SearchTrace search_trace;
    double best_fit = kUnknown;
    if (cfg.algo == Algo::kEvolution) {
      EvolutionResult res = run_evolution(ecfg, fit, clock);
      search_trace = std::move(res.trace);
      for (const auto& ind : res.history) scored.emplace_back(ind.spec, ind.fitness);
      best_fit = res.best.fitness;
      out.evolution_history = std::move(res.history);
    } else {
      ReinforceResult res = run_reinforce(rcfg, fit, clock);
      search_trace = std::move(res.trace);
      scored = std::move(res.history);
      best_fit = res.best_fitness;
      s.invalid_samples = res.invalid_samples;
      s.extra["samples"] = res.samples;
    }
    const std::size_t offset = out.trace.rows().size();
    for (const auto& row : search_trace.rows()) {
      out.trace.record(offset + row.index, row.sim_seconds, kUnknown, row.best_fitness);
    }
    s.evaluations = fit.evaluations();
    s.best_fitness = best_fit;

    Revalidation reval = topk_revalidate(scored, cfg.top_k, oracle, clock, &out.trace, &paid);
    s.revalidations = reval.queries;
    take_best_true(reval.best_spec, reval.best_true_acc);
    s.extra["revalidation"] = {{"queries", reval.queries},
                               {"cost_s", reval.cost_s},
                               {"best_true_accuracy", num_or_null(reval.best_true_acc)}};
    if (reval.best_spec) s.extra["revalidation"]["hash"] = canonical_hash(*reval.best_spec).hex();
    out.predictor = std::move(pipe.predictor);
  }

  s.total_sim_seconds = clock.elapsed_s();
  if (!std::isnan(s.target_accuracy)) s.time_to_target_s = out.trace.first_time_reaching(s.target_accuracy);
  check_consistency(s, out.trace);
  return out;
}

void check_consistency(const RunSummary& summary, const SearchTrace& trace) {
  trace.check_monotone();
  const double final_seconds = trace.empty() ? 0.0 : trace.back().sim_seconds;
  const double final_true = trace.empty() ? kUnknown : trace.back().best_true_acc;
  if (final_seconds != summary.total_sim_seconds) {
    throw NaspError("summary total_sim_seconds disagrees with the final trace row");
  }
  const bool both_nan = std::isnan(final_true) && std::isnan(summary.best_true_acc);
  if (!both_nan && final_true != summary.best_true_acc) {
    throw NaspError("summary best true accuracy disagrees with the final trace row");
  }
}

void write_run(const std::string& dir, const RunOutput& out) {
  check_consistency(out.summary, out.trace);
  std::filesystem::create_directories(dir);
  const std::string tag = "_seed" + std::to_string(out.summary.seed);
  auto open = [&](const std::string& name) {
    std::ofstream f(std::filesystem::path(dir) / name, std::ios::binary);
    if (!f) throw NaspError("cannot write " + name + " in " + dir);
    return f;
  };
  {
    auto f = open("trace" + tag + ".csv");
    out.trace.write_csv(f);
  }
  {
    auto f = open("summary" + tag + ".json");
    f << out.summary.to_json().dump(2) << '\n';
  }
  if (!out.evolution_history.empty()) {
    auto f = open("history" + tag + ".jsonl");
    write_history(f, out.evolution_history);
  }
  if (out.predictor) {
    auto f = open("predictor" + tag + ".json");
    f << out.predictor->to_json().dump() << '\n';
  }
}

std::string SpeedupReport::to_line() const {
  if (status == CompareStatus::kNoCommonTarget) return "NO_COMMON_TARGET";
  std::ostringstream os;
  os << "speedup=" << format_double(speedup) << " target=" << format_double(target)
     << " time_a=" << format_double(time_a) << " time_b=" << format_double(time_b);
  return os.str();
}

SpeedupReport compare_runs(const RunSummary& a, const RunSummary& b) {
  SpeedupReport r;
  if (!a.time_to_target_s || !b.time_to_target_s || std::isnan(a.target_accuracy) ||
      std::isnan(b.target_accuracy) || std::abs(a.target_accuracy - b.target_accuracy) > 1e-12) {
    return r;
  }
  r.status = CompareStatus::kOk;
  r.target = a.target_accuracy;
  r.time_a = *a.time_to_target_s;
  r.time_b = *b.time_to_target_s;
  if (r.time_b > 0.0) {
    r.speedup = r.time_a / r.time_b;
  } else {
    r.speedup = r.time_a > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  }
  return r;
}

}  // namespace nasp
