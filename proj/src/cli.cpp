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


#include "nasp/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "CLI11.hpp"
#include "json.hpp"
#include "nasp/errors.hpp"
#include "nasp/harness.hpp"

namespace nasp {
namespace {

using nlohmann::json;

std::uint64_t parse_u64(const std::string& text, const char* what) {
  std::uint64_t value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw CLI::ValidationError(what, "not an unsigned integer: " + text);
  return value;
}

std::vector<std::uint64_t> parse_list(const std::string& text, const char* what) {
  std::vector<std::uint64_t> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(parse_u64(item, what));
  if (values.empty()) throw CLI::ValidationError(what, "empty list");
  return values;
}

SpaceLimits parse_limits(const std::string& text) {
  const auto v = parse_list(text, "--limits");
  if (v.size() != 2) throw CLI::ValidationError("--limits", "expected V,E");
  SpaceLimits limits{static_cast<int>(v[0]), static_cast<int>(v[1])};
  limits.check();
  return limits;
}

std::uint64_t default_seed() {
  const char* env = std::getenv("NAS_SEED");
  if (env == nullptr || *env == '\0') return 0;
  return parse_u64(env, "NAS_SEED");
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::ofstream open_out(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path);
  if (!out) throw NaspError("cannot write " + path);
  return out;
}

Oracle oracle_from_arg(const std::string& arg, const SyntheticOracleParams& params) {
  return arg == "synthetic" ? Oracle::synthetic(params) : Oracle::from_table(load_table(arg));
}

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

// --- run -------------------------------------------------------------------

struct RunArgs {
  std::string config, algo, fitness, oracle, limits, seeds, out;
  std::uint64_t seed = 0;
  std::size_t cycles = 0, population = 0, sample_size = 0, iterations = 0, batch = 0;
  std::size_t n_label = 0, top_k = 0;
  double lr = 0, label_charge = 0, threshold = 0;
  int epochs = 0;
  bool json_out = false;
};

int do_run(const CLI::App& cmd, const RunArgs& a, std::ostream& out) {
  ExperimentConfig cfg;
  cfg.seeds = {default_seed()};
  if (!a.config.empty()) {
    const json j = read_json_file(a.config);
    cfg = ExperimentConfig::from_json(j);
    if (!j.contains("seeds")) cfg.seeds = {default_seed()};
  }
  auto given = [&](const char* name) { return cmd.count(name) > 0; };
  if (given("--algo")) cfg.algo = algo_from_name(a.algo);
  if (given("--fitness")) cfg.fitness = eval_mode_from_name(a.fitness);
  if (given("--oracle")) cfg.oracle_file = a.oracle == "synthetic" ? "" : a.oracle;
  if (given("--limits")) cfg.limits = parse_limits(a.limits);
  if (given("--cycles")) cfg.evolution.cycles = a.cycles;
  if (given("--population")) cfg.evolution.population_size = a.population;
  if (given("--sample-size")) cfg.evolution.sample_size = a.sample_size;
  if (given("--iterations")) cfg.reinforce.iterations = a.iterations;
  if (given("--batch")) cfg.reinforce.batch = a.batch;
  if (given("--lr")) cfg.reinforce.learning_rate = a.lr;
  if (given("--n-label")) cfg.n_label = a.n_label;
  if (given("--label-charge")) cfg.label_charge = a.label_charge;
  if (given("--top-k")) cfg.top_k = a.top_k;
  if (given("--threshold")) cfg.label_threshold = a.threshold;
  if (given("--epochs")) cfg.predictor.epochs = a.epochs;
  if (given("--seed")) cfg.seeds = {a.seed};
  if (given("--seeds")) cfg.seeds = parse_list(a.seeds, "--seeds");
  cfg.evolution.limits = cfg.limits;
  cfg.reinforce.limits = cfg.limits;
  cfg.check();

  const Oracle oracle = make_oracle(cfg);
  const SpaceFacts facts = describe_space(oracle, cfg.limits, cfg.label_threshold);
  std::filesystem::create_directories(a.out);
  for (const std::uint64_t seed : cfg.seeds) {
    const RunOutput run = run_experiment(cfg, seed, oracle, facts);
    check_consistency(run.summary, run.trace);
    write_run(a.out, run);
    const RunSummary& s = run.summary;
    if (a.json_out) {
      out << s.to_json().dump() << '\n';
    } else {
      out << "seed=" << seed << " algo=" << s.algo << " fitness=" << s.fitness
          << " best_true_acc=" << fmt(s.best_true_acc) << " sim_seconds=" << fmt(s.total_sim_seconds)
          << " target=" << fmt(s.target_accuracy) << " time_to_target_s="
          << (s.time_to_target_s ? fmt(*s.time_to_target_s) : std::string("none")) << '\n';
    }
  }
  return 0;
}

// --- enumerate / gen-synthetic ----------------------------------------------

int do_enumerate(const std::string& limits_arg, const std::string& oracle_arg, std::ostream& out,
                 std::ostream& err) {
  const SpaceLimits limits = parse_limits(limits_arg);
  const Oracle oracle = oracle_from_arg(oracle_arg, SyntheticOracleParams{});
  std::size_t count = 0;
  enumerate_space(limits, [&](const ModelSpec& spec) {
    ++count;
    json line{{"hash", canonical_hash(spec).hex()}, {"spec", spec_to_json(spec)}};
    try {
      line["val_accuracy"] = oracle.lookup(spec).val_accuracy;
    } catch (const UnknownArchitectureError&) {
      line["val_accuracy"] = nullptr;
    }
    out << line.dump() << '\n';
  });
  const SpaceFacts facts = describe_space(oracle, limits);
  err << "classes=" << count;
  if (facts.best_spec) {
    err << " best_hash=" << facts.best_hash.hex() << " best_accuracy=" << fmt(facts.best_accuracy)
        << " unique=" << (facts.best_unique ? 1 : 0) << " best_spec=" << spec_to_json(*facts.best_spec).dump();
  }
  err << '\n';
  return 0;
}

int do_gen_synthetic(const std::string& limits_arg, const std::string& params_path,
                     const std::string& path, std::ostream& out) {
  const SpaceLimits limits = parse_limits(limits_arg);
  SyntheticOracleParams params;
  if (!params_path.empty()) params = SyntheticOracleParams::from_json(read_json_file(params_path));
  std::ofstream file = open_out(path);
  std::size_t count = 0;
  enumerate_space(limits, [&](const ModelSpec& spec) {
    write_table_line(file, spec, synth_record(spec, params));
    ++count;
  });
  out << "records=" << count << " path=" << path << '\n';
  return 0;
}

// --- label / train-predictor -----------------------------------------------

struct LabelArgs {
  std::string limits = "5,9", oracle = "synthetic", out;
  std::size_t n = 400;
  std::uint64_t seed = 0;
  double threshold = 0;
  bool json_out = false;
};

int do_label(const CLI::App& cmd, LabelArgs a, std::ostream& out) {
  const SpaceLimits limits = parse_limits(a.limits);
  if (cmd.count("--seed") == 0) a.seed = default_seed();
  if (a.n == 0) throw ConfigError("--n must be > 0");
  const Oracle oracle = oracle_from_arg(a.oracle, SyntheticOracleParams{});
  const double threshold =
      cmd.count("--threshold") > 0 ? a.threshold : describe_space(oracle, limits).label_threshold;

  Rng rng = derive_rng(a.seed, 4);
  SimClock clock;
  std::unordered_set<CanonicalHash, CanonicalHashHasher> seen;
  std::ofstream file = open_out(a.out);
  std::size_t labels = 0, positives = 0, draws = 0;
  while (labels < a.n) {
    if (++draws > 1000 * a.n) throw ExhaustedError("label: space has fewer than n distinct architectures");
    const ModelSpec spec = random_spec(rng, limits);
    if (!seen.insert(canonical_hash(spec)).second) continue;
    const BenchmarkRecord rec = oracle.query(spec, clock, 1.0);
    const int y = label(rec, threshold);
    positives += y;
    ++labels;
    file << json{{"spec", spec_to_json(spec)}, {"label", y}, {"val_accuracy", rec.val_accuracy},
                 {"threshold", threshold}}
                .dump()
         << '\n';
  }
  if (a.json_out) {
    out << json{{"labels", labels}, {"positives", positives}, {"threshold", threshold},
                {"label_cost_s", clock.elapsed_s()}}
               .dump()
        << '\n';
  } else {
    out << "labels=" << labels << " positives=" << positives << " threshold=" << fmt(threshold)
        << " label_cost_s=" << fmt(clock.elapsed_s()) << '\n';
  }
  return 0;
}

struct TrainArgs {
  std::string data, out;
  TrainConfig train;
  double train_fraction = 0.8;
  double min_positive_fraction = 0.2;
  bool json_out = false;
};

int do_train(const CLI::App& cmd, TrainArgs a, std::ostream& out) {
  if (cmd.count("--seed") == 0) a.train.seed = default_seed();
  std::ifstream in(a.data);
  if (!in) throw ConfigError("cannot open " + a.data);
  std::vector<LabeledSpec> items;
  double threshold = kUnknown;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      const int y = j.at("label").get<int>();
      if (y != 0 && y != 1) throw ParseError(line_no, "label must be 0 or 1");
      items.push_back({spec_from_json(j.at("spec")), y});
      if (j.contains("threshold") && std::isnan(threshold)) threshold = j.at("threshold").get<double>();
    } catch (const json::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
  Rng rng = derive_rng(a.train.seed, 5);
  SplitResult split = stratified_split(std::move(items), a.train_fraction, a.min_positive_fraction, rng);
  const TrainResult result = train(split.train, a.train);
  const double heldout = split.heldout.items.empty()
                             ? kUnknown
                             : binary_accuracy(result.params, split.heldout.items);
  const TrainedPredictor predictor{result.params, threshold, a.train.seed};
  open_out(a.out) << predictor.to_json().dump() << '\n';
  const json report{{"train", split.train.items.size()},
                    {"heldout", split.heldout.items.size()},
                    {"heldout_accuracy", std::isnan(heldout) ? json(nullptr) : json(heldout)},
                    {"final_loss", result.loss_history.back()}};
  if (a.json_out) {
    out << report.dump() << '\n';
  } else {
    out << "train=" << split.train.items.size() << " heldout=" << split.heldout.items.size()
        << " heldout_accuracy=" << fmt(heldout) << " final_loss=" << fmt(result.loss_history.back())
        << '\n';
  }
  return 0;
}

// --- compare ---------------------------------------------------------------

int do_compare(const std::string& a, const std::string& b, bool json_out, std::ostream& out) {
  const SpeedupReport r =
      compare_runs(RunSummary::from_json(read_json_file(a)), RunSummary::from_json(read_json_file(b)));
  if (json_out) {
    json j{{"status", r.status == CompareStatus::kOk ? "OK" : "NO_COMMON_TARGET"}};
    if (r.status == CompareStatus::kOk) {
      j["speedup"] = r.speedup;
      j["target"] = r.target;
      j["time_a"] = r.time_a;
      j["time_b"] = r.time_b;
    }
    out << j.dump() << '\n';
  } else {
    out << r.to_line() << '\n';
  }
  return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Architecture search over bounded cell spaces", "nasp"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run one experiment per seed");
  run_cmd->add_option("--config", run.config, "JSON experiment config (flags override it)");
  run_cmd->add_option("--algo", run.algo, "evolution | reinforce")
      ->check(CLI::IsMember({"evolution", "reinforce"}));
  run_cmd->add_option("--fitness", run.fitness, "oracle | predictor")
      ->check(CLI::IsMember({"oracle", "predictor"}));
  run_cmd->add_option("--oracle", run.oracle, "'synthetic' or a benchmark table file");
  run_cmd->add_option("--limits", run.limits, "max_vertices,max_edges");
  run_cmd->add_option("--cycles", run.cycles, "evolution cycles");
  run_cmd->add_option("--population", run.population, "evolution population size");
  run_cmd->add_option("--sample-size", run.sample_size, "evolution tournament size");
  run_cmd->add_option("--iterations", run.iterations, "controller iterations");
  run_cmd->add_option("--batch", run.batch, "controller batch size");
  run_cmd->add_option("--lr", run.lr, "controller learning rate");
  run_cmd->add_option("--n-label", run.n_label, "architectures labeled for the predictor");
  run_cmd->add_option("--label-charge", run.label_charge, "fraction of training time per label");
  run_cmd->add_option("--top-k", run.top_k, "architectures revalidated after a predictor search");
  run_cmd->add_option("--threshold", run.threshold, "label threshold");
  run_cmd->add_option("--epochs", run.epochs, "predictor training epochs");
  run_cmd->add_option("--seed", run.seed, "seed (default: $NAS_SEED or 0)");
  run_cmd->add_option("--seeds", run.seeds, "comma-separated seeds");
  run_cmd->add_option("--out", run.out, "output directory")->required();
  run_cmd->add_flag("--json", run.json_out, "print summaries as JSON lines");

  std::string enum_limits = "5,9";
  std::string enum_oracle = "synthetic";
  auto* enum_cmd = app.add_subcommand("enumerate", "List every class of a space; optimum on stderr");
  enum_cmd->add_option("--limits", enum_limits, "max_vertices,max_edges")->capture_default_str();
  enum_cmd->add_option("--oracle", enum_oracle, "'synthetic' or a table file")->capture_default_str();

  LabelArgs label_args;
  auto* label_cmd = app.add_subcommand("label", "Write a labeled dataset of random architectures");
  label_cmd->add_option("--limits", label_args.limits)->capture_default_str();
  label_cmd->add_option("--oracle", label_args.oracle)->capture_default_str();
  label_cmd->add_option("--n", label_args.n, "distinct architectures")->capture_default_str();
  label_cmd->add_option("--seed", label_args.seed, "seed (default: $NAS_SEED or 0)");
  label_cmd->add_option("--threshold", label_args.threshold, "label threshold");
  label_cmd->add_option("--out", label_args.out, "output file")->required();
  label_cmd->add_flag("--json", label_args.json_out);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train-predictor", "Train the predictor on a labeled dataset");
  train_cmd->add_option("--data", train_args.data, "labeled dataset file")->required();
  train_cmd->add_option("--out", train_args.out, "predictor JSON output")->required();
  train_cmd->add_option("--epochs", train_args.train.epochs)->capture_default_str();
  train_cmd->add_option("--lr", train_args.train.learning_rate)->capture_default_str();
  train_cmd->add_option("--batch", train_args.train.batch)->capture_default_str();
  train_cmd->add_option("--hidden", train_args.train.hidden)->capture_default_str();
  train_cmd->add_option("--init-scale", train_args.train.init_scale)->capture_default_str();
  train_cmd->add_option("--seed", train_args.train.seed, "seed (default: $NAS_SEED or 0)");
  train_cmd->add_option("--train-fraction", train_args.train_fraction)->capture_default_str();
  train_cmd->add_option("--min-positive-fraction", train_args.min_positive_fraction)
      ->capture_default_str();
  train_cmd->add_flag("--json", train_args.json_out);

  std::string cmp_a, cmp_b;
  bool cmp_json = false;
  auto* cmp_cmd = app.add_subcommand("compare", "Speedup of run B over run A from two summaries");
  cmp_cmd->add_option("a", cmp_a, "baseline summary")->required();
  cmp_cmd->add_option("b", cmp_b, "candidate summary")->required();
  cmp_cmd->add_flag("--json", cmp_json);

  std::string gen_limits = "5,9", gen_params, gen_out;
  auto* gen_cmd = app.add_subcommand("gen-synthetic", "Write the synthetic benchmark as a table file");
  gen_cmd->add_option("--limits", gen_limits)->capture_default_str();
  gen_cmd->add_option("--params", gen_params, "JSON synthetic coefficients");
  gen_cmd->add_option("--out", gen_out, "output file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  }

  try {
    if (*run_cmd) return do_run(*run_cmd, run, out);
    if (*enum_cmd) return do_enumerate(enum_limits, enum_oracle, out, err);
    if (*label_cmd) return do_label(*label_cmd, label_args, out);
    if (*train_cmd) return do_train(*train_cmd, train_args, out);
    if (*cmp_cmd) return do_compare(cmp_a, cmp_b, cmp_json, out);
    if (*gen_cmd) return do_gen_synthetic(gen_limits, gen_params, gen_out, out);
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace nasp
