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


#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "nasp/errors.hpp"
#include "nasp/fitness.hpp"
#include "nasp/reinforce.hpp"
#include "support.hpp"

using namespace nasp;
using namespace nasp::testing;

namespace {

constexpr double kBanditRewards[3] = {1.0, 0.0, 0.0};

Controller bandit_controller(std::uint64_t seed, double scale = 0.3) {
  Rng rng(seed);
  return Controller(DecisionSchedule::custom({3}), 6, 5, scale, rng);
}

// Exact E[grad log pi(a) (R(a) - b)] by enumerating the three actions.
std::vector<double> exact_expectation(const Controller& c, double b) {
  const auto pi = step_distributions(c, std::vector<int>{0}).at(0);
  std::vector<double> out(c.theta().size(), 0.0);
  for (int a = 0; a < 3; ++a) {
    const auto g = logprob_gradient(c, std::vector<int>{a});
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += pi[a] * g[i] * (kBanditRewards[a] - b);
  }
  return out;
}

SampledArch bandit_draw(const Controller& c, Rng& rng) {
  SampledArch s = sample(c, rng, {});
  s.reward = kBanditRewards[s.actions.at(0)];
  return s;
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

}  // namespace

TEST_SUITE("schedule") {
  TEST_CASE("default space has 26 decisions") {
    const auto s = DecisionSchedule::for_space(7);
    CHECK(s.size() == 26);
    CHECK(std::count(s.arities.begin(), s.arities.end(), 2) == 21);
    CHECK(std::all_of(s.arities.begin() + 21, s.arities.end(), [](int a) { return a == 3; }));
  }

  TEST_CASE("custom arities are checked") {
    CHECK_THROWS_AS(DecisionSchedule::custom({2, 4}), ConfigError);
    CHECK_THROWS_AS(DecisionSchedule::custom({}), ConfigError);
  }

  TEST_CASE("actions decode into pruned cells") {
    const auto s = DecisionSchedule::for_space(3);
    // Edge bits (0,1), (0,2), (1,2), then the op of vertex 1.
    const std::vector<int> chain{1, 0, 1, 1};
    CHECK(actions_to_spec(s, chain, {3, 9}) == cell(3, {{0, 1}, {1, 2}}, {IN, C1, OUT}));
    const std::vector<int> skip_only{0, 1, 0, 2};
    CHECK(actions_to_spec(s, skip_only, {3, 9}) == two_vertex());
    const std::vector<int> none{0, 0, 0, 0};
    CHECK_FALSE(actions_to_spec(s, none, {3, 9}).has_value());
    const std::vector<int> full{1, 1, 1, 0};
    CHECK_FALSE(actions_to_spec(s, full, {3, 2}).has_value());
  }
}

TEST_SUITE("sample") {
  TEST_CASE("zero controller samples uniformly") {
    const Controller c(DecisionSchedule::for_space(7));
    Rng rng(2024);
    constexpr int n = 10'000;
    std::vector<std::array<int, 3>> counts(26, {0, 0, 0});
    for (int i = 0; i < n; ++i) {
      const auto s = sample(c, rng, {7, 9});
      for (std::size_t t = 0; t < 26; ++t) ++counts[t][static_cast<std::size_t>(s.actions[t])];
    }
    for (std::size_t t = 0; t < 26; ++t) {
      const int arity = c.schedule().arities[t];
      const double p = 1.0 / arity;
      const double sigma = std::sqrt(p * (1 - p) / n);
      for (int a = 0; a < arity; ++a) {
        CHECK(std::abs(counts[t][static_cast<std::size_t>(a)] / double(n) - p) <= 3 * sigma);
      }
    }
  }

  TEST_CASE("log-probability terms") {
    Rng init(5);
    const Controller c(DecisionSchedule::for_space(7), 16, 8, 0.5, init);
    Rng rng(6);
    for (int i = 0; i < 200; ++i) {
      const auto s = sample(c, rng, {7, 9});
      REQUIRE(s.logprob_terms.size() == 26);
      const auto dists = step_distributions(c, s.actions);
      double log_prod = 0.0;
      double sum = 0.0;
      for (std::size_t t = 0; t < 26; ++t) {
        CHECK(s.logprob_terms[t] <= 0.0);
        const auto& d = dists[t];
        CHECK(std::abs(std::accumulate(d.begin(), d.end(), 0.0) - 1.0) <= 1e-12);
        log_prod += std::log(d[static_cast<std::size_t>(s.actions[t])]);
        sum += s.logprob_terms[t];
      }
      CHECK(std::abs(sum - log_prod) <= 1e-12);
      CHECK(std::abs(sum - sequence_logprob(c, s.actions)) <= 1e-12);
    }
  }

  TEST_CASE("seeded determinism") {
    Rng init(5);
    const Controller c(DecisionSchedule::for_space(7), 16, 8, 0.5, init);
    Rng a(77), b(77);
    for (int i = 0; i < 20; ++i) CHECK(sample(c, a, {7, 9}).actions == sample(c, b, {7, 9}).actions);
  }

  TEST_CASE("valid samples are pruned and within limits") {
    const Controller c(DecisionSchedule::for_space(7));
    Rng rng(8);
    int valid = 0;
    for (int i = 0; i < 2000; ++i) {
      const auto s = sample(c, rng, {7, 9});
      if (!s.spec) continue;
      ++valid;
      CHECK(brute_valid(*s.spec, {7, 9}));
      CHECK(prune(*s.spec) == *s.spec);
    }
    CHECK(valid > 0);
  }
}

TEST_SUITE("gradients") {
  TEST_CASE("log-prob gradient matches finite differences on 120 instances") {
    Rng rng(99);
    double worst = 0.0;
    for (int trial = 0; trial < 120; ++trial) {
      std::vector<int> arities(1 + uniform_index(rng, 7));
      for (auto& a : arities) a = coin(rng) ? 2 : 3;
      Controller c(DecisionSchedule::custom(arities), 1 + uniform_index(rng, 6), 1 + uniform_index(rng, 5),
                   0.8, rng);
      const auto s = sample(c, rng, {});
      const auto g = logprob_gradient(c, s.actions);
      REQUIRE(g.size() == c.theta().size());
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double keep = c.theta()[i];
        c.theta()[i] = keep + 1e-5;
        const double up = sequence_logprob(c, s.actions);
        c.theta()[i] = keep - 1e-5;
        const double down = sequence_logprob(c, s.actions);
        c.theta()[i] = keep;
        worst = std::max(worst, rel_err(g[i], (up - down) / 2e-5));
      }
    }
    MESSAGE("max relative error " << worst);
    CHECK(worst <= 1e-4);
  }

  TEST_CASE("rewards equal to the baseline give no update") {
    Rng init(3);
    Controller c(DecisionSchedule::for_space(5), 8, 8, 0.3, init);
    Rng rng(4);
    std::vector<SampledArch> batch;
    for (int i = 0; i < 5; ++i) {
      batch.push_back(sample(c, rng, {5, 9}));
      batch.back().reward = 0.7;
    }
    const auto g = reinforce_gradient(c, batch, 0.7);
    CHECK(std::all_of(g.begin(), g.end(), [](double x) { return x == 0.0; }));
    const std::vector<double> before(c.theta().begin(), c.theta().end());
    reinforce_update(c, batch, Baseline{0.7, 0.9, true}, 0.5);
    CHECK(std::equal(before.begin(), before.end(), c.theta().begin()));
    CHECK_THROWS_AS(reinforce_gradient(c, std::vector<SampledArch>{}, 0.0), ShapeError);
  }

  TEST_CASE("baseline term vanishes in expectation") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Controller c = bandit_controller(seed, 1.0);
      const auto pi = step_distributions(c, std::vector<int>{0}).at(0);
      std::vector<double> total(c.theta().size(), 0.0);
      for (int a = 0; a < 3; ++a) {
        const auto g = logprob_gradient(c, std::vector<int>{a});
        for (std::size_t i = 0; i < total.size(); ++i) total[i] += pi[a] * g[i];
      }
      for (double x : total) CHECK(std::abs(x) <= 1e-10);
    }
  }

  TEST_CASE("Monte Carlo update matches the exact expectation") {
    const Controller c = bandit_controller(12);
    const double b = 0.25;
    const auto exact = exact_expectation(c, b);
    // Increasing the logit of the rewarded action.
    const std::size_t bias0 = c.layout().head3_b;
    CHECK(exact[bias0] > 0.0);
    CHECK(exact[bias0 + 1] < 0.0);
    CHECK(exact[bias0 + 2] < 0.0);

    double norm = 0.0;
    for (double x : exact) norm += x * x;
    norm = std::sqrt(norm);
    // Tracked statistics: three head biases and the projection onto the
    // exact direction.
    constexpr int n = 10'000;
    std::array<double, 4> sum{}, sum_sq{};
    Rng rng(13);
    for (int k = 0; k < n; ++k) {
      const std::vector<SampledArch> one{bandit_draw(c, rng)};
      const auto g = reinforce_gradient(c, one, b);
      double proj = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) proj += g[i] * exact[i] / norm;
      const std::array<double, 4> stats{g[bias0], g[bias0 + 1], g[bias0 + 2], proj};
      for (std::size_t j = 0; j < 4; ++j) {
        sum[j] += stats[j];
        sum_sq[j] += stats[j] * stats[j];
      }
    }
    const std::array<double, 4> want{exact[bias0], exact[bias0 + 1], exact[bias0 + 2], norm};
    for (std::size_t j = 0; j < 4; ++j) {
      const double mean = sum[j] / n;
      const double sd = std::sqrt(std::max(0.0, sum_sq[j] / n - mean * mean));
      CHECK(std::abs(mean - want[j]) <= 3 * sd / std::sqrt(double(n)));
    }
  }

  TEST_CASE("EMA baseline reduces estimator variance") {
    const Controller c = bandit_controller(21);
    constexpr int batches = 10'000;
    constexpr int m = 5;
    Rng rng(22);
    Baseline baseline;
    std::vector<double> sum_b(c.theta().size(), 0.0), sq_b(sum_b.size(), 0.0);
    std::vector<double> sum_0(sum_b.size(), 0.0), sq_0(sum_b.size(), 0.0);
    for (int k = 0; k < batches; ++k) {
      std::vector<SampledArch> batch;
      double mean = 0.0;
      for (int i = 0; i < m; ++i) {
        batch.push_back(bandit_draw(c, rng));
        mean += batch.back().reward / m;
      }
      const auto with_b = reinforce_gradient(c, batch, baseline.value);
      const auto without = reinforce_gradient(c, batch, 0.0);
      baseline = baseline_update(baseline, mean);
      for (std::size_t i = 0; i < sum_b.size(); ++i) {
        sum_b[i] += with_b[i];
        sq_b[i] += with_b[i] * with_b[i];
        sum_0[i] += without[i];
        sq_0[i] += without[i] * without[i];
      }
    }
    double var_b = 0.0, var_0 = 0.0;
    for (std::size_t i = 0; i < sum_b.size(); ++i) {
      var_b += sq_b[i] / batches - std::pow(sum_b[i] / batches, 2);
      var_0 += sq_0[i] / batches - std::pow(sum_0[i] / batches, 2);
    }
    MESSAGE("total variance with baseline " << var_b << ", without " << var_0);
    CHECK(var_b < var_0);
  }
}

TEST_SUITE("baseline") {
  TEST_CASE("arithmetic") {
    const Baseline first = baseline_update({}, 0.8);
    CHECK(first.initialized);
    CHECK(first.value == 0.8);
    const Baseline next = baseline_update(Baseline{0.8, 0.9, true}, 0.6);
    CHECK(std::abs(next.value - 0.78) < 1e-15);
  }

  TEST_CASE("constant stream converges monotonically") {
    Baseline b = baseline_update({}, 0.2);
    double prev = b.value;
    for (int i = 0; i < 300; ++i) {
      b = baseline_update(b, 0.9);
      CHECK(b.value >= prev);
      CHECK(b.value <= 0.9);
      prev = b.value;
    }
    CHECK(std::abs(b.value - 0.9) < 1e-12);
  }

  TEST_CASE("stays within the range of rewards seen") {
    Rng rng(1);
    Baseline b;
    double lo = 1e9, hi = -1e9;
    for (int i = 0; i < 1000; ++i) {
      const double r = uniform_real(rng, -2.0, 3.0);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      b = baseline_update(b, r);
      CHECK(b.value >= lo - 1e-12);
      CHECK(b.value <= hi + 1e-12);
    }
  }
}

TEST_SUITE("reward_of") {
  TEST_CASE("invalid sample earns nothing and costs nothing") {
    const Oracle oracle = Oracle::synthetic({});
    OracleFitness fit(oracle, false);
    SimClock clock;
    SampledArch invalid;
    CHECK(reward_of(invalid, fit, clock) == 0.0);
    CHECK(clock.elapsed_s() == 0.0);
    CHECK(fit.evaluations() == 0);
  }

  TEST_CASE("oracle and predictor modes") {
    const Oracle oracle = Oracle::synthetic({});
    OracleFitness fit(oracle, false);
    SimClock clock;
    SampledArch s;
    s.spec = optimum_5_9();
    const auto rec = synth_record(optimum_5_9(), {});
    CHECK(reward_of(s, fit, clock) == rec.val_accuracy);
    CHECK(clock.elapsed_s() == rec.train_time_s);

    Rng rng(3);
    const RnnParams params = init_params(8, 0.5, rng);
    PredictorFitness pf(params);
    SimClock free;
    const double r = reward_of(s, pf, free);
    CHECK(r > 0.0);
    CHECK(r < 1.0);
    CHECK(free.elapsed_s() == 0.0);
  }
}

TEST_SUITE("run_reinforce") {
  TEST_CASE("zero iterations") {
    const Oracle oracle = Oracle::synthetic({});
    OracleFitness fit(oracle, false);
    SimClock clock;
    ReinforceConfig cfg;
    cfg.iterations = 0;
    cfg.limits = {5, 9};
    cfg.seed = 4;
    const auto r = run_reinforce(cfg, fit, clock);
    CHECK(r.trace.empty());
    CHECK(r.samples == 0);
    Rng init = derive_rng(4, 1);
    const Controller fresh(DecisionSchedule::for_space(5), cfg.hidden, cfg.embed, cfg.init_scale, init);
    CHECK(std::equal(fresh.theta().begin(), fresh.theta().end(), r.controller.theta().begin()));
    CHECK(clock.elapsed_s() == 0.0);
  }

  TEST_CASE("bandit converges to the best action") {
    Controller c = bandit_controller(31, 0.1);
    Baseline baseline;
    Rng rng(32);
    for (int it = 0; it < 2000; ++it) {
      std::vector<SampledArch> batch;
      double mean = 0.0;
      for (int i = 0; i < 5; ++i) {
        batch.push_back(bandit_draw(c, rng));
        mean += batch.back().reward / 5;
      }
      const Baseline before = baseline;
      baseline = baseline_update(baseline, mean);
      reinforce_update(c, batch, before, 0.1);
    }
    const double p_best = step_distributions(c, std::vector<int>{0}).at(0).at(0);
    MESSAGE("P(best action) = " << p_best);
    CHECK(p_best >= 0.95);
  }

  TEST_CASE("oracle run bookkeeping") {
    const Oracle oracle = Oracle::synthetic({});
    ReinforceConfig cfg;
    cfg.iterations = 40;
    cfg.limits = {5, 9};
    cfg.seed = 9;
    OracleFitness fit(oracle, false);
    SimClock clock;
    const auto r = run_reinforce(cfg, fit, clock);
    CHECK(r.trace.rows().size() == 40);
    CHECK_NOTHROW(r.trace.check_monotone());
    CHECK(r.samples == 200);
    CHECK(r.history.size() + r.invalid_samples == r.samples);
    CHECK(fit.evaluations() == r.history.size());
    CHECK(r.trace.back().sim_seconds == clock.elapsed_s());
    double spent = 0.0;
    for (const auto& [spec, f] : r.history) spent += synth_record(spec, {}).train_time_s;
    CHECK(std::abs(spent - clock.elapsed_s()) < 1e-6);
    if (!std::isnan(r.best_true_acc)) CHECK(r.trace.back().best_true_acc == r.best_true_acc);

    OracleFitness again_fit(oracle, false);
    SimClock again_clock;
    const auto again = run_reinforce(cfg, again_fit, again_clock);
    CHECK(std::equal(again.controller.theta().begin(), again.controller.theta().end(),
                     r.controller.theta().begin()));
    CHECK(again_clock.elapsed_s() == clock.elapsed_s());
  }

  TEST_CASE("predictor mode never advances the clock") {
    Rng rng(3);
    const RnnParams params = init_params(8, 0.5, rng);
    PredictorFitness pf(params);
    SimClock clock;
    ReinforceConfig cfg;
    cfg.iterations = 30;
    cfg.limits = {5, 9};
    const auto r = run_reinforce(cfg, pf, clock);
    CHECK(clock.elapsed_s() == 0.0);
    CHECK(std::isnan(r.best_true_acc));
    CHECK(r.trace.rows().size() == 30);
  }
}

TEST_CASE("controller json round trip") {
  Rng rng(40);
  const Controller c(DecisionSchedule::for_space(5), 8, 4, 0.5, rng);
  const Controller back = Controller::from_json(nlohmann::json::parse(c.to_json().dump()));
  CHECK(back.schedule().arities == c.schedule().arities);
  REQUIRE(back.theta().size() == c.theta().size());
  for (std::size_t i = 0; i < c.theta().size(); ++i) CHECK(std::abs(back.theta()[i] - c.theta()[i]) <= 1e-12);
}
