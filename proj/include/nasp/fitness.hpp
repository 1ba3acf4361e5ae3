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

// Pluggable fitness for the search loops: ground truth from an oracle (charges
// the simulated clock) or a trained predictor (free).

#include <cstddef>
#include <optional>
#include <string_view>
#include <unordered_set>

#include "nasp/cellspace.hpp"
#include "nasp/oracle.hpp"
#include "nasp/predictor.hpp"

namespace nasp {

enum class EvalMode { kOracle, kPredictor };

std::string_view eval_mode_name(EvalMode mode);

struct Evaluation {
  double fitness = 0.0;
  // Known only when the oracle was consulted.
  std::optional<double> true_accuracy;
  bool memo_hit = false;
};

class Fitness {
 public:
  virtual ~Fitness() = default;
  virtual EvalMode mode() const = 0;
  // spec must be pruned and valid.
  virtual Evaluation evaluate(const ModelSpec& spec, SimClock& clock) = 0;
};

class OracleFitness final : public Fitness {
 public:
  // With memoize set, a hash seen before in this run is answered without a
  // second clock charge.
  OracleFitness(const Oracle& oracle, bool memoize, double charge = 1.0)
      : oracle_(oracle), memoize_(memoize), charge_(charge) {}

  EvalMode mode() const override { return EvalMode::kOracle; }
  Evaluation evaluate(const ModelSpec& spec, SimClock& clock) override;

  std::size_t evaluations() const { return evaluations_; }
  std::size_t memo_hits() const { return memo_hits_; }

 private:
  const Oracle& oracle_;
  bool memoize_;
  double charge_;
  std::unordered_set<CanonicalHash, CanonicalHashHasher> charged_;
  std::size_t evaluations_ = 0;
  std::size_t memo_hits_ = 0;
};

class PredictorFitness final : public Fitness {
 public:
  explicit PredictorFitness(const RnnParams& params) : params_(params) {}

  EvalMode mode() const override { return EvalMode::kPredictor; }
  Evaluation evaluate(const ModelSpec& spec, SimClock& clock) override;

  std::size_t evaluations() const { return evaluations_; }

 private:
  const RnnParams& params_;
  std::size_t evaluations_ = 0;
};

}  // namespace nasp
