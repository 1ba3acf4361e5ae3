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

// Recurrent binary performance predictor. An architecture is read as a token
// sequence (interior ops, a separator, then the upper-triangular adjacency
// bits) by a single-layer Elman network whose final state feeds a logistic
// output: the probability that the architecture clears the accuracy
// threshold.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "nasp/cellspace.hpp"
#include "nasp/rng.hpp"

namespace nasp {

enum class Token : std::uint8_t {
  kOpConv3x3 = 0,
  kOpConv1x1 = 1,
  kOpMaxPool = 2,
  kEdge0 = 3,
  kEdge1 = 4,
  kSep = 5,
};
inline constexpr std::size_t kAlphabetSize = 6;

using TokenSeq = std::vector<Token>;

// Encodes the spec exactly as stored. Throws InvalidSpecError unless the spec
// is pruned and valid.
TokenSeq encode(const ModelSpec& spec);

// Flat parameter vector with named views. Layout: W_x (hidden x 6, row-major),
// W_h (hidden x hidden), b_h, w_o, b_o.
class RnnParams {
 public:
  explicit RnnParams(std::size_t hidden = 16);

  std::size_t hidden() const { return hidden_; }
  std::size_t size() const { return theta_.size(); }
  std::span<double> theta() { return theta_; }
  std::span<const double> theta() const { return theta_; }

  std::span<double> w_x() { return theta_span(0, hidden_ * kAlphabetSize); }
  std::span<double> w_h() { return theta_span(off_wh(), hidden_ * hidden_); }
  std::span<double> b_h() { return theta_span(off_bh(), hidden_); }
  std::span<double> w_o() { return theta_span(off_wo(), hidden_); }
  double& b_o() { return theta_.back(); }
  std::span<const double> w_x() const { return theta_span(0, hidden_ * kAlphabetSize); }
  std::span<const double> w_h() const { return theta_span(off_wh(), hidden_ * hidden_); }
  std::span<const double> b_h() const { return theta_span(off_bh(), hidden_); }
  std::span<const double> w_o() const { return theta_span(off_wo(), hidden_); }
  double b_o() const { return theta_.back(); }

  bool all_finite() const;
  friend bool operator==(const RnnParams&, const RnnParams&) = default;

 private:
  std::size_t off_wh() const { return hidden_ * kAlphabetSize; }
  std::size_t off_bh() const { return off_wh() + hidden_ * hidden_; }
  std::size_t off_wo() const { return off_bh() + hidden_; }
  std::span<double> theta_span(std::size_t off, std::size_t n) {
    return std::span<double>(theta_).subspan(off, n);
  }
  std::span<const double> theta_span(std::size_t off, std::size_t n) const {
    return std::span<const double>(theta_).subspan(off, n);
  }

  std::size_t hidden_;
  std::vector<double> theta_;
};

// Probability in (0, 1). Throws ShapeError on an empty sequence.
double forward(const RnnParams& params, const TokenSeq& seq);

struct LabeledSeq {
  TokenSeq tokens;
  int label = 0;
};

struct LossAndGrad {
  double loss = 0.0;
  std::vector<double> grad;  // same layout as RnnParams::theta()
};

// Mean binary cross-entropy over the batch and its exact gradient
// (backpropagation through time). Throws ShapeError on an empty batch.
LossAndGrad loss_and_grad(const RnnParams& params, std::span<const LabeledSeq> batch);

struct TrainConfig {
  double learning_rate = 0.05;
  int epochs = 200;
  int batch = 16;
  std::uint64_t seed = 0;
  double init_scale = 0.5;
  std::size_t hidden = 16;

  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

struct LabeledSpec {
  ModelSpec spec;
  int label = 0;
};

enum class Split { kTrain, kHeldout };

struct LabeledDataset {
  std::vector<LabeledSpec> items;
  Split split = Split::kTrain;

  std::size_t positives() const;
};

struct TrainResult {
  RnnParams params;
  // Mean training loss over the full training set after each epoch.
  std::vector<double> loss_history;
};

RnnParams init_params(std::size_t hidden, double init_scale, Rng& rng);

// Plain mini-batch gradient descent over shuffled data. Throws
// DegenerateDataError unless both classes are present, ConfigError on a
// nonpositive setting.
TrainResult train(const LabeledDataset& data, const TrainConfig& cfg);

// encode(canonical_form(spec)) through forward. Never touches a clock.
double predict(const RnnParams& params, const ModelSpec& spec);

// Fraction of items whose thresholded (p > 0.5) prediction matches the label.
double binary_accuracy(const RnnParams& params, const std::vector<LabeledSpec>& items);

struct TrainedPredictor {
  RnnParams params;
  double threshold_used = 0.0;
  std::uint64_t train_seed = 0;

  nlohmann::json to_json() const;
  // Throws ShapeError on inconsistent dimensions.
  static TrainedPredictor from_json(const nlohmann::json& j);
};

}  // namespace nasp
