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

#include "nasp/reinforce.hpp"

#include <algorithm>
#include <cmath>

#include "nasp/errors.hpp"
#include "nasp/kernels.hpp"

namespace nasp {
namespace {

constexpr std::size_t kEmbeddingRows = 6;

Controller::Layout make_layout(std::size_t hidden, std::size_t embed) {
  Controller::Layout l{};
  std::size_t off = 0;
  l.emb = off;
  off += kEmbeddingRows * embed;
  l.w_x = off;
  off += hidden * embed;
  l.w_h = off;
  off += hidden * hidden;
  l.b_h = off;
  off += hidden;
  l.head2_w = off;
  off += 2 * hidden;
  l.head2_b = off;
  off += 2;
  l.head3_w = off;
  off += 3 * hidden;
  l.head3_b = off;
  off += 3;
  l.total = off;
  return l;
}

// Embedding row consumed at step t.
std::size_t input_row(const DecisionSchedule& schedule, std::span<const int> actions, std::size_t t) {
  if (t == 0) return 0;
  const int prev_arity = schedule.arities[t - 1];
  return static_cast<std::size_t>((prev_arity == 2 ? 1 : 3) + actions[t - 1]);
}

struct Rollout {
  std::vector<int> actions;
  std::vector<double> states;  // h_0..h_T, each `hidden` wide
  std::vector<std::vector<double>> probs;
  std::vector<double> logprobs;
};

// Runs the controller over the schedule. With rng set, actions are sampled;
// otherwise `fixed` supplies them.
Rollout roll(const Controller& c, std::span<const int> fixed, Rng* rng) {
  const auto& sched = c.schedule();
  const std::size_t steps = sched.size();
  const std::size_t hidden = c.hidden();
  const std::size_t embed = c.embed();
  const auto& l = c.layout();
  const auto theta = c.theta();
  if (rng == nullptr && fixed.size() != steps) {
    throw ShapeError("controller: action list length does not match schedule");
  }

  Rollout r;
  r.actions.reserve(steps);
  r.states.assign((steps + 1) * hidden, 0.0);
  r.probs.reserve(steps);
  r.logprobs.reserve(steps);
  std::vector<double> logits;
  for (std::size_t t = 0; t < steps; ++t) {
    const std::size_t row = input_row(sched, r.actions, t);
    std::span<const double> x = theta.subspan(l.emb + row * embed, embed);
    std::span<const double> prev(r.states.data() + t * hidden, hidden);
    std::span<double> h(r.states.data() + (t + 1) * hidden, hidden);
    std::copy_n(theta.begin() + static_cast<std::ptrdiff_t>(l.b_h), hidden, h.begin());
    kernels::gemv_acc(theta.subspan(l.w_x, hidden * embed), hidden, embed, x, h);
    kernels::gemv_acc(theta.subspan(l.w_h, hidden * hidden), hidden, hidden, prev, h);
    for (double& v : h) v = std::tanh(v);

    const auto arity = static_cast<std::size_t>(sched.arities[t]);
    const std::size_t hw = arity == 2 ? l.head2_w : l.head3_w;
    const std::size_t hb = arity == 2 ? l.head2_b : l.head3_b;
    logits.assign(theta.begin() + static_cast<std::ptrdiff_t>(hb),
                  theta.begin() + static_cast<std::ptrdiff_t>(hb + arity));
    kernels::gemv_acc(theta.subspan(hw, arity * hidden), arity, hidden, h, logits);
    const double mx = *std::max_element(logits.begin(), logits.end());
    double norm = 0.0;
    std::vector<double> p(arity);
    for (std::size_t a = 0; a < arity; ++a) norm += p[a] = std::exp(logits[a] - mx);
    for (double& v : p) v /= norm;
    const double lse = mx + std::log(norm);

    int action = 0;
    if (rng != nullptr) {
      const double u = uniform_unit(*rng);
      double acc = 0.0;
      action = static_cast<int>(arity) - 1;
      for (std::size_t a = 0; a < arity; ++a) {
        acc += p[a];
        if (u < acc) {
          action = static_cast<int>(a);
          break;
        }
      }
    } else {
      action = fixed[t];
      if (action < 0 || static_cast<std::size_t>(action) >= arity) {
        throw ShapeError("controller: action outside decision arity");
      }
    }
    r.actions.push_back(action);
    r.logprobs.push_back(logits[static_cast<std::size_t>(action)] - lse);
    r.probs.push_back(std::move(p));
  }
  return r;
}

// grad += weight * d/dtheta sum_t log P(a_t | a_<t)
void accumulate_gradient(const Controller& c, const Rollout& r, double weight,
                         std::span<double> grad) {
  if (weight == 0.0) return;
  const auto& sched = c.schedule();
  const std::size_t steps = sched.size();
  const std::size_t hidden = c.hidden();
  const std::size_t embed = c.embed();
  const auto& l = c.layout();
  const auto theta = c.theta();

  std::vector<double> dh(hidden, 0.0);  // gradient flowing into h_t from later steps
  std::vector<double> da(hidden);
  std::vector<double> dlogits;
  for (std::size_t t = steps; t-- > 0;) {
    std::span<const double> h(r.states.data() + (t + 1) * hidden, hidden);
    std::span<const double> prev(r.states.data() + t * hidden, hidden);
    const auto arity = static_cast<std::size_t>(sched.arities[t]);
    const std::size_t hw = arity == 2 ? l.head2_w : l.head3_w;
    const std::size_t hb = arity == 2 ? l.head2_b : l.head3_b;

    dlogits.assign(arity, 0.0);
    for (std::size_t a = 0; a < arity; ++a) {
      dlogits[a] = weight * ((static_cast<int>(a) == r.actions[t] ? 1.0 : 0.0) - r.probs[t][a]);
    }
    kernels::axpy(1.0, dlogits, grad.subspan(hb, arity));
    kernels::ger(1.0, dlogits, h, grad.subspan(hw, arity * hidden));
    kernels::gemv_t_acc(theta.subspan(hw, arity * hidden), arity, hidden, dlogits, dh);

    for (std::size_t k = 0; k < hidden; ++k) da[k] = dh[k] * (1.0 - h[k] * h[k]);
    const std::size_t row = input_row(sched, r.actions, t);
    std::span<const double> x = theta.subspan(l.emb + row * embed, embed);
    kernels::axpy(1.0, da, grad.subspan(l.b_h, hidden));
    kernels::ger(1.0, da, x, grad.subspan(l.w_x, hidden * embed));
    kernels::ger(1.0, da, prev, grad.subspan(l.w_h, hidden * hidden));
    kernels::gemv_t_acc(theta.subspan(l.w_x, hidden * embed), hidden, embed, da,
                        grad.subspan(l.emb + row * embed, embed));
    std::fill(dh.begin(), dh.end(), 0.0);
    kernels::gemv_t_acc(theta.subspan(l.w_h, hidden * hidden), hidden, hidden, da, dh);
  }
}

OpLabel op_for_action(int action) { return kInteriorOps[static_cast<std::size_t>(action)]; }

}  // namespace

DecisionSchedule DecisionSchedule::for_space(int max_vertices) {
  if (max_vertices < 2) throw ConfigError("schedule: max_vertices must be >= 2");
  DecisionSchedule s;
  s.max_vertices = max_vertices;
  s.arities.assign(static_cast<std::size_t>(max_vertices * (max_vertices - 1) / 2), 2);
  s.arities.insert(s.arities.end(), static_cast<std::size_t>(max_vertices - 2), 3);
  return s;
}

DecisionSchedule DecisionSchedule::custom(std::vector<int> arities) {
  if (arities.empty()) throw ConfigError("schedule: at least one decision required");
  for (int a : arities) {
    if (a != 2 && a != 3) throw ConfigError("schedule: arity must be 2 or 3");
  }
  DecisionSchedule s;
  s.arities = std::move(arities);
  return s;
}

nlohmann::json DecisionSchedule::to_json() const {
  return {{"max_vertices", max_vertices}, {"arities", arities}};
}

Controller::Controller(DecisionSchedule schedule, std::size_t hidden, std::size_t embed)
    : schedule_(std::move(schedule)),
      hidden_(hidden),
      embed_(embed),
      layout_(make_layout(hidden, embed)),
      theta_(layout_.total, 0.0) {
  if (hidden == 0 || embed == 0) throw ShapeError("controller: sizes must be positive");
  if (schedule_.arities.empty()) throw ShapeError("controller: empty schedule");
}

Controller::Controller(DecisionSchedule schedule, std::size_t hidden, std::size_t embed,
                       double init_scale, Rng& rng)
    : Controller(std::move(schedule), hidden, embed) {
  for (double& x : theta_) x = uniform_real(rng, -init_scale, init_scale);
}

nlohmann::json Controller::to_json() const {
  return {{"schedule", schedule_.to_json()}, {"hidden", hidden_}, {"embed", embed_},
          {"theta", theta_}};
}

Controller Controller::from_json(const nlohmann::json& j) {
  try {
    DecisionSchedule sched = DecisionSchedule::custom(j.at("schedule").at("arities").get<std::vector<int>>());
    sched.max_vertices = j.at("schedule").at("max_vertices").get<int>();
    Controller c(std::move(sched), j.at("hidden").get<std::size_t>(), j.at("embed").get<std::size_t>());
    const auto theta = j.at("theta").get<std::vector<double>>();
    if (theta.size() != c.theta_.size()) throw ShapeError("controller file: theta length mismatch");
    c.theta_ = theta;
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ShapeError(std::string("controller file: ") + e.what());
  }
}

std::optional<ModelSpec> actions_to_spec(const DecisionSchedule& schedule,
                                         std::span<const int> actions,
                                         const SpaceLimits& limits) {
  const int v = schedule.max_vertices;
  if (v < 2 || actions.size() != schedule.size()) {
    throw ShapeError("actions_to_spec: schedule does not describe a cell");
  }
  std::vector<std::uint8_t> adj(static_cast<std::size_t>(v * v), 0);
  std::size_t k = 0;
  for (int i = 0; i < v; ++i) {
    for (int j = i + 1; j < v; ++j) adj[static_cast<std::size_t>(i * v + j)] = actions[k++] != 0;
  }
  std::vector<OpLabel> ops(static_cast<std::size_t>(v));
  ops.front() = OpLabel::kIn;
  ops.back() = OpLabel::kOut;
  for (int i = 1; i < v - 1; ++i) ops[static_cast<std::size_t>(i)] = op_for_action(actions[k++]);
  const ModelSpec raw(v, std::move(adj), std::move(ops));
  try {
    ModelSpec pruned = prune(raw);
    if (!validate(pruned, limits).valid) return std::nullopt;
    return pruned;
  } catch (const NoPathError&) {
    return std::nullopt;
  }
}

SampledArch sample(const Controller& controller, Rng& rng, const SpaceLimits& limits) {
  Rollout r = roll(controller, {}, &rng);
  SampledArch s;
  s.actions = std::move(r.actions);
  s.logprob_terms = std::move(r.logprobs);
  if (controller.schedule().max_vertices >= 2) {
    s.spec = actions_to_spec(controller.schedule(), s.actions, limits);
  }
  return s;
}

std::vector<std::vector<double>> step_distributions(const Controller& controller,
                                                    std::span<const int> actions) {
  return roll(controller, actions, nullptr).probs;
}

double sequence_logprob(const Controller& controller, std::span<const int> actions) {
  const Rollout r = roll(controller, actions, nullptr);
  double total = 0.0;
  for (double lp : r.logprobs) total += lp;
  return total;
}

std::vector<double> logprob_gradient(const Controller& controller, std::span<const int> actions) {
  const Rollout r = roll(controller, actions, nullptr);
  std::vector<double> grad(controller.theta().size(), 0.0);
  accumulate_gradient(controller, r, 1.0, grad);
  return grad;
}

double reward_of(const SampledArch& s, Fitness& fitness, SimClock& clock) {
  if (!s.spec) return 0.0;
  return fitness.evaluate(*s.spec, clock).fitness;
}

Baseline baseline_update(Baseline baseline, double batch_mean_reward) {
  if (!baseline.initialized) {
    baseline.value = batch_mean_reward;
    baseline.initialized = true;
  } else {
    baseline.value = baseline.beta * baseline.value + (1.0 - baseline.beta) * batch_mean_reward;
  }
  return baseline;
}

std::vector<double> reinforce_gradient(const Controller& controller,
                                       std::span<const SampledArch> batch, double baseline) {
  if (batch.empty()) throw ShapeError("reinforce: empty batch");
  std::vector<double> grad(controller.theta().size(), 0.0);
  const double inv_m = 1.0 / static_cast<double>(batch.size());
  for (const auto& s : batch) {
    const double advantage = s.reward - baseline;
    if (advantage == 0.0) continue;
    const Rollout r = roll(controller, s.actions, nullptr);
    accumulate_gradient(controller, r, advantage * inv_m, grad);
  }
  return grad;
}

void reinforce_update(Controller& controller, std::span<const SampledArch> batch,
                      const Baseline& baseline, double learning_rate) {
  const auto grad = reinforce_gradient(controller, batch, baseline.value);
  kernels::axpy(learning_rate, grad, controller.theta());
}

nlohmann::json ReinforceConfig::to_json() const {
  return {{"batch", batch},
          {"iterations", iterations},
          {"learning_rate", learning_rate},
          {"hidden", hidden},
          {"embed", embed},
          {"init_scale", init_scale},
          {"baseline_decay", baseline_decay},
          {"seed", seed},
          {"limits", {limits.max_vertices, limits.max_edges}}};
}

ReinforceConfig ReinforceConfig::from_json(const nlohmann::json& j) {
  ReinforceConfig c;
  c.batch = j.value("batch", c.batch);
  c.iterations = j.value("iterations", c.iterations);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.hidden = j.value("hidden", c.hidden);
  c.embed = j.value("embed", c.embed);
  c.init_scale = j.value("init_scale", c.init_scale);
  c.baseline_decay = j.value("baseline_decay", c.baseline_decay);
  c.seed = j.value("seed", c.seed);
  if (j.contains("limits")) {
    c.limits.max_vertices = j.at("limits").at(0).get<int>();
    c.limits.max_edges = j.at("limits").at(1).get<int>();
  }
  return c;
}

ReinforceResult run_reinforce(const ReinforceConfig& cfg, Fitness& fitness, SimClock& clock) {
  if (cfg.batch == 0) throw ConfigError("reinforce: batch size must be >= 1");
  cfg.limits.check();
  Rng init_rng = derive_rng(cfg.seed, 1);
  Rng rng = derive_rng(cfg.seed, 2);
  ReinforceResult res{Controller(DecisionSchedule::for_space(cfg.limits.max_vertices), cfg.hidden,
                                 cfg.embed, cfg.init_scale, init_rng),
                      Baseline{0.0, cfg.baseline_decay, false},
                      {}, std::nullopt, kUnknown, kUnknown, std::nullopt, 0, 0, {}};
  std::vector<SampledArch> batch(cfg.batch);
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    double sum = 0.0;
    double batch_best_true = kUnknown;
    double batch_best_fit = kUnknown;
    for (auto& s : batch) {
      s = sample(res.controller, rng, cfg.limits);
      ++res.samples;
      if (!s.spec) {
        ++res.invalid_samples;
        s.reward = 0.0;
      } else {
        const Evaluation ev = fitness.evaluate(*s.spec, clock);
        s.reward = ev.fitness;
        res.history.emplace_back(*s.spec, ev.fitness);
        if (std::isnan(res.best_fitness) || ev.fitness > res.best_fitness) {
          res.best_fitness = ev.fitness;
          res.best_spec = s.spec;
        }
        if (std::isnan(batch_best_fit) || ev.fitness > batch_best_fit) batch_best_fit = ev.fitness;
        if (ev.true_accuracy) {
          if (std::isnan(res.best_true_acc) || *ev.true_accuracy > res.best_true_acc) {
            res.best_true_acc = *ev.true_accuracy;
            res.best_true_spec = s.spec;
          }
          if (std::isnan(batch_best_true) || *ev.true_accuracy > batch_best_true) {
            batch_best_true = *ev.true_accuracy;
          }
        }
      }
      sum += s.reward;
    }
    // The gradient uses the baseline from previous batches only.
    const Baseline before = res.baseline;
    res.baseline = baseline_update(res.baseline, sum / static_cast<double>(batch.size()));
    reinforce_update(res.controller, batch, before, cfg.learning_rate);
    res.trace.record(it + 1, clock.elapsed_s(), batch_best_true, batch_best_fit);
  }
  return res;
}

}  // namespace nasp
