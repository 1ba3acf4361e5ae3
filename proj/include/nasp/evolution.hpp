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

// Aging (regularized) evolution. The population is a FIFO queue: each cycle
// a tournament of S members drawn with replacement picks the parent, its
// mutated child joins at the back and the oldest member leaves from the
// front.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <vector>

#include "json.hpp"
#include "nasp/cellspace.hpp"
#include "nasp/fitness.hpp"
#include "nasp/oracle.hpp"
#include "nasp/rng.hpp"
#include "nasp/trace.hpp"

namespace nasp {

struct Individual {
  ModelSpec spec;
  double fitness = 0.0;
  std::optional<double> true_accuracy;
  EvalMode eval_mode = EvalMode::kOracle;
  std::uint64_t birth_index = 0;
  double clock_s = 0.0;  // simulated time when evaluated
};

using Population = std::deque<Individual>;

struct EvolutionConfig {
  std::size_t population_size = 50;  // P
  std::size_t sample_size = 10;      // S
  std::size_t cycles = 2000;         // C, counted as total evaluated models
  std::uint64_t seed = 0;
  SpaceLimits limits{};

  // Throws ConfigError unless 1 <= S <= P <= C.
  void check() const;
  nlohmann::json to_json() const;
  static EvolutionConfig from_json(const nlohmann::json& j);
};

// Running state of one evolution run.
struct EvolutionState {
  Population population;
  std::vector<Individual> history;
  SearchTrace trace;
  std::uint64_t next_birth = 0;
};

void init_population(EvolutionState& state, const EvolutionConfig& cfg, Fitness& fitness,
                     SimClock& clock, Rng& rng);

// Highest fitness among S draws with replacement; the younger individual wins
// ties.
const Individual& tournament_select(const Population& population, std::size_t sample_size,
                                    Rng& rng);

void evolve_cycle(EvolutionState& state, const EvolutionConfig& cfg, Fitness& fitness,
                  SimClock& clock, Rng& rng);

struct EvolutionResult {
  Individual best;  // history-wide max fitness
  SearchTrace trace;
  std::vector<Individual> history;
};

EvolutionResult run_evolution(const EvolutionConfig& cfg, Fitness& fitness, SimClock& clock);

// One JSON object per line: {cycle, spec, fitness, eval_mode, clock_s}.
void write_history(std::ostream& out, const std::vector<Individual>& history);

}  // namespace nasp
