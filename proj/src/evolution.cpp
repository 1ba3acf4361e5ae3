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

#include "nasp/evolution.hpp"

#include <cmath>
#include <ostream>

#include "nasp/errors.hpp"

namespace nasp {
namespace {

Individual evaluate_new(EvolutionState& state, ModelSpec spec, Fitness& fitness, SimClock& clock) {
  const Evaluation ev = fitness.evaluate(spec, clock);
  Individual ind{std::move(spec), ev.fitness, ev.true_accuracy, fitness.mode(), state.next_birth++,
                 clock.elapsed_s()};
  state.population.push_back(ind);
  state.history.push_back(ind);
  state.trace.record(state.history.size(), clock.elapsed_s(),
                     ind.true_accuracy.value_or(kUnknown), ind.fitness);
  return ind;
}

}  // namespace

void EvolutionConfig::check() const {
  limits.check();
  if (sample_size < 1 || sample_size > population_size) {
    throw ConfigError("evolution: need 1 <= S <= P");
  }
  if (cycles < population_size) throw ConfigError("evolution: need C >= P");
}

nlohmann::json EvolutionConfig::to_json() const {
  return {{"population_size", population_size},
          {"sample_size", sample_size},
          {"cycles", cycles},
          {"seed", seed},
          {"limits", {limits.max_vertices, limits.max_edges}}};
}

EvolutionConfig EvolutionConfig::from_json(const nlohmann::json& j) {
  EvolutionConfig c;
  c.population_size = j.value("population_size", c.population_size);
  c.sample_size = j.value("sample_size", c.sample_size);
  c.cycles = j.value("cycles", c.cycles);
  c.seed = j.value("seed", c.seed);
  if (j.contains("limits")) {
    c.limits.max_vertices = j.at("limits").at(0).get<int>();
    c.limits.max_edges = j.at("limits").at(1).get<int>();
  }
  return c;
}

void init_population(EvolutionState& state, const EvolutionConfig& cfg, Fitness& fitness,
                     SimClock& clock, Rng& rng) {
  while (state.population.size() < cfg.population_size) {
    evaluate_new(state, random_spec(rng, cfg.limits), fitness, clock);
  }
}

const Individual& tournament_select(const Population& population, std::size_t sample_size,
                                    Rng& rng) {
  if (population.empty()) throw ConfigError("tournament_select: empty population");
  const Individual* best = nullptr;
  for (std::size_t k = 0; k < sample_size; ++k) {
    const Individual& cand = population[uniform_index(rng, population.size())];
    if (best == nullptr || cand.fitness > best->fitness ||
        (cand.fitness == best->fitness && cand.birth_index > best->birth_index)) {
      best = &cand;
    }
  }
  return *best;
}

void evolve_cycle(EvolutionState& state, const EvolutionConfig& cfg, Fitness& fitness,
                  SimClock& clock, Rng& rng) {
  const Individual& parent = tournament_select(state.population, cfg.sample_size, rng);
  ModelSpec child = mutate(parent.spec, rng, cfg.limits);
  evaluate_new(state, std::move(child), fitness, clock);
  state.population.pop_front();
}

EvolutionResult run_evolution(const EvolutionConfig& cfg, Fitness& fitness, SimClock& clock) {
  cfg.check();
  Rng rng = derive_rng(cfg.seed, 3);
  EvolutionState state;
  init_population(state, cfg, fitness, clock, rng);
  while (state.history.size() < cfg.cycles) evolve_cycle(state, cfg, fitness, clock, rng);

  const Individual* best = &state.history.front();
  for (const auto& ind : state.history) {
    if (ind.fitness > best->fitness) best = &ind;
  }
  return {*best, std::move(state.trace), std::move(state.history)};
}

void write_history(std::ostream& out, const std::vector<Individual>& history) {
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto& ind = history[i];
    const nlohmann::json j = {{"cycle", i + 1},
                              {"spec", spec_to_json(ind.spec)},
                              {"fitness", ind.fitness},
                              {"eval_mode", std::string(eval_mode_name(ind.eval_mode))},
                              {"clock_s", ind.clock_s}};
    out << j.dump() << '\n';
  }
}

}  // namespace nasp
