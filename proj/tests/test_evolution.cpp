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


#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "nasp/errors.hpp"
#include "nasp/evolution.hpp"
#include "support.hpp"

using namespace nasp;
using namespace nasp::testing;

namespace {

Individual person(double fitness, std::uint64_t birth) {
  return Individual{two_vertex(), fitness, std::nullopt, EvalMode::kOracle, birth, 0.0};
}

// Fitness that gets worse with every call; charges nothing.
class Decaying final : public Fitness {
 public:
  EvalMode mode() const override { return EvalMode::kPredictor; }
  Evaluation evaluate(const ModelSpec&, SimClock&) override {
    return {1.0 / static_cast<double>(++calls_), std::nullopt, false};
  }

 private:
  std::size_t calls_ = 0;
};

EvolutionConfig small_config(std::size_t p, std::size_t s, std::size_t c, std::uint64_t seed = 0) {
  EvolutionConfig cfg;
  cfg.population_size = p;
  cfg.sample_size = s;
  cfg.cycles = c;
  cfg.seed = seed;
  cfg.limits = {5, 9};
  return cfg;
}

}  // namespace

TEST_SUITE("fitness") {
  TEST_CASE("oracle memo charges each class once") {
    const Oracle oracle = Oracle::synthetic({});
    OracleFitness memo(oracle, true);
    SimClock clock;
    const auto p = cell(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}, {IN, C3, C1, OUT});
    const auto q = cell(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}, {IN, C1, C3, OUT});
    const auto first = memo.evaluate(p, clock);
    const double after_first = clock.elapsed_s();
    const auto second = memo.evaluate(q, clock);
    CHECK_FALSE(first.memo_hit);
    CHECK(second.memo_hit);
    CHECK(second.fitness == first.fitness);
    CHECK(clock.elapsed_s() == after_first);
    CHECK(memo.memo_hits() == 1);
    CHECK(memo.evaluations() == 2);

    OracleFitness plain(oracle, false);
    SimClock twice;
    plain.evaluate(p, twice);
    plain.evaluate(q, twice);
    CHECK(twice.elapsed_s() == 2 * after_first);
  }

  TEST_CASE("oracle fitness carries the true accuracy") {
    const Oracle oracle = Oracle::synthetic({});
    OracleFitness f(oracle, false);
    SimClock clock;
    const auto ev = f.evaluate(optimum_5_9(), clock);
    REQUIRE(ev.true_accuracy.has_value());
    CHECK(*ev.true_accuracy == ev.fitness);
    CHECK(f.mode() == EvalMode::kOracle);
    CHECK(eval_mode_name(EvalMode::kOracle) == "oracle");
    CHECK(eval_mode_name(EvalMode::kPredictor) == "predictor");
  }
}

TEST_SUITE("config") {
  TEST_CASE("bounds") {
    CHECK_NOTHROW(small_config(5, 5, 5).check());
    CHECK_THROWS_AS(small_config(5, 0, 10).check(), ConfigError);
    CHECK_THROWS_AS(small_config(5, 6, 10).check(), ConfigError);
    CHECK_THROWS_AS(small_config(5, 2, 4).check(), ConfigError);
  }

  TEST_CASE("json round trip") {
    const auto cfg = small_config(7, 3, 70, 5);
    const auto back = EvolutionConfig::from_json(cfg.to_json());
    CHECK(back.population_size == 7);
    CHECK(back.sample_size == 3);
    CHECK(back.cycles == 70);
    CHECK(back.seed == 5);
    CHECK(back.limits == cfg.limits);
  }
}

TEST_SUITE("init_population") {
  TEST_CASE("single individual") {
    const Oracle oracle = Oracle::synthetic({});
    OracleFitness f(oracle, false);
    SimClock clock;
    EvolutionState state;
    Rng rng(1);
    init_population(state, small_config(1, 1, 1), f, clock, rng);
    CHECK(state.population.size() == 1);
    CHECK(state.history.size() == 1);
  }

  TEST_CASE("clock charged for every member") {
    const Oracle oracle = Oracle::synthetic({});
    OracleFitness f(oracle, false);
    SimClock clock;
    EvolutionState state;
    Rng rng(2);
    init_population(state, small_config(50, 10, 50), f, clock, rng);
    double sum = 0.0;
    for (const auto& ind : state.population) sum += synth_record(ind.spec, {}).train_time_s;
    CHECK(clock.elapsed_s() == doctest::Approx(sum).epsilon(1e-12));
    for (std::size_t i = 0; i < 50; ++i) CHECK(state.population[i].birth_index == i);
  }

  TEST_CASE("seeded determinism") {
    const Oracle oracle = Oracle::synthetic({});
    auto run = [&] {
      OracleFitness f(oracle, false);
      SimClock clock;
      EvolutionState state;
      Rng rng(3);
      init_population(state, small_config(20, 5, 20), f, clock, rng);
      std::vector<ModelSpec> specs;
      for (const auto& ind : state.population) specs.push_back(ind.spec);
      return specs;
    };
    CHECK(run() == run());
  }
}

TEST_SUITE("tournament_select") {
  TEST_CASE("single draw returns the drawn member") {
    Population pop;
    for (int i = 0; i < 6; ++i) pop.push_back(person(0.1 * i, static_cast<std::uint64_t>(i)));
    Rng rng(7);
    for (int k = 0; k < 100; ++k) {
      Rng shadow = rng;
      const auto idx = uniform_index(shadow, pop.size());
      CHECK(tournament_select(pop, 1, rng).birth_index == pop[idx].birth_index);
    }
  }

  TEST_CASE("a sampled top individual wins") {
    Population pop{person(0.3, 0), person(1.0, 1), person(0.5, 2), person(0.2, 3), person(0.9, 4)};
    Rng rng(8);
    for (int k = 0; k < 50; ++k) CHECK(tournament_select(pop, 200, rng).fitness == 1.0);
  }

  TEST_CASE("younger wins ties") {
    Population pop{person(0.5, 10), person(0.5, 11), person(0.5, 12)};
    Rng rng(9);
    for (int k = 0; k < 50; ++k) CHECK(tournament_select(pop, 100, rng).birth_index == 12);
  }

  TEST_CASE("distribution matches enumeration of all 16 draws") {
    Population pop{person(0.4, 0), person(0.1, 1), person(0.9, 2), person(0.6, 3)};
    std::array<double, 4> exact{};
    for (std::size_t a = 0; a < 4; ++a) {
      for (std::size_t b = 0; b < 4; ++b) {
        const std::size_t win = pop[a].fitness >= pop[b].fitness ? a : b;
        exact[win] += 1.0 / 16.0;
      }
    }
    CHECK(exact[2] == 7.0 / 16.0);
    constexpr int n = 100'000;
    std::array<int, 4> counts{};
    Rng rng(10);
    for (int k = 0; k < n; ++k) ++counts[tournament_select(pop, 2, rng).birth_index];
    for (std::size_t i = 0; i < 4; ++i) {
      const double sigma = std::sqrt(exact[i] * (1 - exact[i]) / n);
      CHECK(std::abs(counts[i] / double(n) - exact[i]) <= 3 * sigma);
    }
  }

  TEST_CASE("empty population") {
    Rng rng(0);
    CHECK_THROWS_AS(tournament_select(Population{}, 2, rng), ConfigError);
  }
}

TEST_SUITE("evolve_cycle") {
  TEST_CASE("aging window and FIFO removal") {
    const Oracle oracle = Oracle::synthetic({});
    OracleFitness f(oracle, true);
    SimClock clock;
    EvolutionState state;
    Rng rng(11);
    const auto cfg = small_config(10, 3, 300);
    init_population(state, cfg, f, clock, rng);
    for (int cycle = 0; cycle < 290; ++cycle) {
      const std::uint64_t oldest = state.population.front().birth_index;
      const std::size_t before = state.history.size();
      evolve_cycle(state, cfg, f, clock, rng);
      CHECK(state.population.size() == 10);
      CHECK(state.history.size() == before + 1);
      CHECK(state.population.front().birth_index == oldest + 1);
      for (std::size_t i = 0; i < 10; ++i) {
        CHECK(state.population[i].birth_index == state.next_birth - 10 + i);
      }
      CHECK(state.population.back().birth_index == state.history.back().birth_index);
    }
    CHECK_NOTHROW(state.trace.check_monotone());
    CHECK(state.trace.rows().size() == 300);
  }
}

TEST_SUITE("run_evolution") {
  TEST_CASE("no cycles when C equals P") {
    const Oracle oracle = Oracle::synthetic({});
    OracleFitness f(oracle, true);
    SimClock clock;
    const auto r = run_evolution(small_config(12, 4, 12, 2), f, clock);
    CHECK(r.history.size() == 12);
    double best = -1.0;
    for (const auto& ind : r.history) best = std::max(best, ind.fitness);
    CHECK(r.best.fitness == best);
  }

  TEST_CASE("best is taken over the whole history") {
    Decaying f;
    SimClock clock;
    const auto r = run_evolution(small_config(5, 2, 60, 3), f, clock);
    CHECK(r.history.size() == 60);
    CHECK(r.best.birth_index == 0);
    CHECK(r.best.fitness == 1.0);
    // Birth 0 left the queue after the fifth cycle.
    CHECK(r.history.back().birth_index == 59);
  }

  TEST_CASE("history, trace and determinism") {
    const Oracle oracle = Oracle::synthetic({});
    auto once = [&] {
      OracleFitness f(oracle, true);
      SimClock clock;
      auto r = run_evolution(small_config(20, 5, 400, 17), f, clock);
      return std::make_pair(std::move(r), clock.elapsed_s());
    };
    const auto [a, ta] = once();
    const auto [b, tb] = once();
    CHECK(ta == tb);
    REQUIRE(a.history.size() == 400);
    for (std::size_t i = 0; i < a.history.size(); ++i) {
      CHECK(a.history[i].spec == b.history[i].spec);
      CHECK(a.history[i].birth_index == i);
      CHECK(a.history[i].fitness >= 0.0);
      CHECK(a.history[i].fitness <= 1.0);
    }
    CHECK_NOTHROW(a.trace.check_monotone());
    CHECK(a.trace.back().sim_seconds == ta);
    CHECK(a.trace.back().best_fitness == a.best.fitness);
    // Memoized accounting: only distinct classes are paid for.
    std::set<CanonicalHash> distinct;
    double paid = 0.0;
    for (const auto& ind : a.history) {
      if (distinct.insert(canonical_hash(ind.spec)).second) paid += synth_record(ind.spec, {}).train_time_s;
    }
    CHECK(ta == doctest::Approx(paid).epsilon(1e-12));
  }

  TEST_CASE("predictor mode leaves the clock alone") {
    Rng rng(5);
    const RnnParams params = init_params(8, 0.5, rng);
    PredictorFitness f(params);
    SimClock clock;
    const auto r = run_evolution(small_config(10, 3, 200, 1), f, clock);
    CHECK(clock.elapsed_s() == 0.0);
    CHECK(r.best.eval_mode == EvalMode::kPredictor);
    CHECK_FALSE(r.best.true_accuracy.has_value());
    CHECK(f.evaluations() == 200);
  }

  TEST_CASE("history export") {
    const Oracle oracle = Oracle::synthetic({});
    OracleFitness f(oracle, true);
    SimClock clock;
    const auto r = run_evolution(small_config(3, 2, 6), f, clock);
    std::ostringstream os;
    write_history(os, r.history);
    std::istringstream in(os.str());
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      const auto j = nlohmann::json::parse(line);
      ++n;
      CHECK(j.at("cycle") == n);
      CHECK(spec_from_json(j.at("spec")) == r.history[n - 1].spec);
      CHECK(j.at("eval_mode") == "oracle");
      CHECK(j.at("clock_s").get<double>() == r.history[n - 1].clock_s);
    }
    CHECK(n == 6);
  }
}
