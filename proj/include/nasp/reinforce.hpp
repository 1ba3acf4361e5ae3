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

// REINFORCE over architecture decisions. An autoregressive recurrent
// controller emits one action per decision (edge bits, then interior ops),
// and is trained with the score-function estimator
//
//   g = 1/m * sum_k sum_t grad log P(a_t | a_<t) * (R_k - b),
//
// where b is an exponential moving average of earlier batch rewards.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "nasp/cellspace.hpp"
#include "nasp/fitness.hpp"
#include "nasp/oracle.hpp"
#include "nasp/rng.hpp"
#include "nasp/trace.hpp"

namespace nasp {

// Arity (2 or 3) of each decision in order.
struct DecisionSchedule {
  std::vector<int> arities;
  // Nonzero when the decisions build a cell: C(v, 2) edge bits in row-major
  // upper-triangular order, then v - 2 interior ops.
  int max_vertices = 0;

  static DecisionSchedule for_space(int max_vertices);
  static DecisionSchedule custom(std::vector<int> arities);

  std::size_t size() const { return arities.size(); }
  nlohmann::json to_json() const;
};

// Controller parameters theta in one flat vector. Layout: embeddings (6 rows
// of embed: start, edge actions 0/1, op actions 0/1/2), W_x (hidden x embed),
// W_h (hidden x hidden), b_h, binary head (2 x hidden) + bias, ternary head
// (3 x hidden) + bias.
class Controller {
 public:
  // All-zero parameters: every decision is uniform.
  Controller(DecisionSchedule schedule, std::size_t hidden = 32, std::size_t embed = 32);
  // Uniform in [-init_scale, init_scale].
  Controller(DecisionSchedule schedule, std::size_t hidden, std::size_t embed,
             double init_scale, Rng& rng);

  const DecisionSchedule& schedule() const { return schedule_; }
  std::size_t hidden() const { return hidden_; }
  std::size_t embed() const { return embed_; }
  std::span<double> theta() { return theta_; }
  std::span<const double> theta() const { return theta_; }

  struct Layout {
    std::size_t emb, w_x, w_h, b_h, head2_w, head2_b, head3_w, head3_b, total;
  };
  const Layout& layout() const { return layout_; }

  nlohmann::json to_json() const;
  static Controller from_json(const nlohmann::json& j);

 private:
  DecisionSchedule schedule_;
  std::size_t hidden_;
  std::size_t embed_;
  Layout layout_;
  std::vector<double> theta_;
};

struct SampledArch {
  std::vector<int> actions;
  std::vector<double> logprob_terms;
  std::optional<ModelSpec> spec;  // pruned and valid, or empty when invalid
  double reward = 0.0;
};

// Decodes a full action list into a pruned, valid spec (nullopt if invalid).
std::optional<ModelSpec> actions_to_spec(const DecisionSchedule& schedule,
                                         std::span<const int> actions,
                                         const SpaceLimits& limits);

SampledArch sample(const Controller& controller, Rng& rng, const SpaceLimits& limits);

// Per-step action distributions for a fixed action list.
std::vector<std::vector<double>> step_distributions(const Controller& controller,
                                                    std::span<const int> actions);
double sequence_logprob(const Controller& controller, std::span<const int> actions);
// Gradient of sum_t log P(a_t | a_<t) with respect to theta.
std::vector<double> logprob_gradient(const Controller& controller, std::span<const int> actions);

// Invalid samples get 0 and cost nothing; valid ones get the fitness value.
double reward_of(const SampledArch& s, Fitness& fitness, SimClock& clock);

struct Baseline {
  double value = 0.0;
  double beta = 0.9;
  bool initialized = false;
};

Baseline baseline_update(Baseline baseline, double batch_mean_reward);

// The REINFORCE estimate (ascent direction) for a batch with rewards attached.
// Throws ShapeError on an empty batch.
std::vector<double> reinforce_gradient(const Controller& controller,
                                       std::span<const SampledArch> batch, double baseline);
void reinforce_update(Controller& controller, std::span<const SampledArch> batch,
                      const Baseline& baseline, double learning_rate);

struct ReinforceConfig {
  std::size_t batch = 5;  // m
  std::size_t iterations = 200;
  double learning_rate = 0.3;
  std::size_t hidden = 32;
  std::size_t embed = 32;
  double init_scale = 0.1;
  double baseline_decay = 0.9;
  std::uint64_t seed = 0;
  SpaceLimits limits{};

  nlohmann::json to_json() const;
  static ReinforceConfig from_json(const nlohmann::json& j);
};

struct ReinforceResult {
  Controller controller;
  Baseline baseline;
  SearchTrace trace;
  std::optional<ModelSpec> best_spec;  // by fitness
  double best_fitness = kUnknown;
  double best_true_acc = kUnknown;  // best ground truth seen (oracle mode)
  std::optional<ModelSpec> best_true_spec;
  std::size_t samples = 0;
  std::size_t invalid_samples = 0;
  // Every valid sample in order, for top-k revalidation.
  std::vector<std::pair<ModelSpec, double>> history;
};

ReinforceResult run_reinforce(const ReinforceConfig& cfg, Fitness& fitness, SimClock& clock);

}  // namespace nasp
