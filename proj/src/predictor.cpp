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

#include "nasp/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nasp/errors.hpp"
#include "nasp/kernels.hpp"

namespace nasp {
namespace {

double sigmoid(double z) {
  const double p = z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
  return std::clamp(p, std::numeric_limits<double>::min(),
                    std::nextafter(1.0, 0.0));
}

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// Hidden states h_0..h_T stacked row by row; returns the output logit.
double run_forward(const RnnParams& params, const TokenSeq& seq, std::vector<double>& states) {
  const std::size_t hidden = params.hidden();
  if (seq.empty()) throw ShapeError("predictor: empty token sequence");
  states.assign((seq.size() + 1) * hidden, 0.0);
  const auto w_x = params.w_x();
  const auto b_h = params.b_h();
  for (std::size_t t = 0; t < seq.size(); ++t) {
    const auto tok = static_cast<std::size_t>(seq[t]);
    if (tok >= kAlphabetSize) throw ShapeError("predictor: token outside alphabet");
    std::span<const double> prev(states.data() + t * hidden, hidden);
    std::span<double> cur(states.data() + (t + 1) * hidden, hidden);
    for (std::size_t r = 0; r < hidden; ++r) cur[r] = w_x[r * kAlphabetSize + tok] + b_h[r];
    kernels::gemv_acc(params.w_h(), hidden, hidden, prev, cur);
    for (double& x : cur) x = std::tanh(x);
  }
  std::span<const double> last(states.data() + seq.size() * hidden, hidden);
  return kernels::dot(params.w_o(), last) + params.b_o();
}

}  // namespace

TokenSeq encode(const ModelSpec& spec) {
  if (!validate(spec, SpaceLimits{spec.num_vertices(), std::max(1, spec.edge_count())}).valid) {
    throw InvalidSpecError("encode: spec is not pruned and valid");
  }
  const int v = spec.num_vertices();
  TokenSeq seq;
  seq.reserve(static_cast<std::size_t>((v - 2) + 1 + v * (v - 1) / 2));
  for (int i = 1; i < v - 1; ++i) {
    switch (spec.op(i)) {
      case OpLabel::kConv3x3:
        seq.push_back(Token::kOpConv3x3);
        break;
      case OpLabel::kConv1x1:
        seq.push_back(Token::kOpConv1x1);
        break;
      default:
        seq.push_back(Token::kOpMaxPool);
        break;
    }
  }
  seq.push_back(Token::kSep);
  for (int i = 0; i < v; ++i) {
    for (int j = i + 1; j < v; ++j) seq.push_back(spec.has_edge(i, j) ? Token::kEdge1 : Token::kEdge0);
  }
  return seq;
}

RnnParams::RnnParams(std::size_t hidden)
    : hidden_(hidden), theta_(hidden * kAlphabetSize + hidden * hidden + 2 * hidden + 1, 0.0) {
  if (hidden == 0) throw ShapeError("RnnParams: hidden size must be positive");
}

bool RnnParams::all_finite() const {
  return std::all_of(theta_.begin(), theta_.end(), [](double x) { return std::isfinite(x); });
}

double forward(const RnnParams& params, const TokenSeq& seq) {
  std::vector<double> states;
  return sigmoid(run_forward(params, seq, states));
}

LossAndGrad loss_and_grad(const RnnParams& params, std::span<const LabeledSeq> batch) {
  if (batch.empty()) throw ShapeError("loss_and_grad: empty batch");
  const std::size_t hidden = params.hidden();
  RnnParams grad(hidden);
  double total = 0.0;
  std::vector<double> states;
  std::vector<double> dh(hidden);
  std::vector<double> da(hidden);
  for (const auto& item : batch) {
    const double z = run_forward(params, item.tokens, states);
    const double y = item.label;
    total += softplus(z) - y * z;
    const double dz = 1.0 / (1.0 + std::exp(-z)) - y;

    const std::size_t steps = item.tokens.size();
    std::span<const double> last(states.data() + steps * hidden, hidden);
    kernels::axpy(dz, last, grad.w_o());
    grad.b_o() += dz;
    std::fill(dh.begin(), dh.end(), 0.0);
    kernels::axpy(dz, params.w_o(), dh);

    for (std::size_t t = steps; t-- > 0;) {
      std::span<const double> h(states.data() + (t + 1) * hidden, hidden);
      std::span<const double> prev(states.data() + t * hidden, hidden);
      for (std::size_t r = 0; r < hidden; ++r) da[r] = dh[r] * (1.0 - h[r] * h[r]);
      kernels::axpy(1.0, da, grad.b_h());
      const auto tok = static_cast<std::size_t>(item.tokens[t]);
      auto gwx = grad.w_x();
      for (std::size_t r = 0; r < hidden; ++r) gwx[r * kAlphabetSize + tok] += da[r];
      kernels::ger(1.0, da, prev, grad.w_h());
      std::fill(dh.begin(), dh.end(), 0.0);
      kernels::gemv_t_acc(params.w_h(), hidden, hidden, da, dh);
    }
  }
  const double scale = 1.0 / static_cast<double>(batch.size());
  LossAndGrad out;
  out.loss = total * scale;
  out.grad.assign(grad.theta().begin(), grad.theta().end());
  for (double& g : out.grad) g *= scale;
  return out;
}

nlohmann::json TrainConfig::to_json() const {
  return {{"learning_rate", learning_rate}, {"epochs", epochs}, {"batch", batch},
          {"seed", seed}, {"init_scale", init_scale}, {"hidden", hidden}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig cfg;
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.epochs = j.value("epochs", cfg.epochs);
  cfg.batch = j.value("batch", cfg.batch);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.init_scale = j.value("init_scale", cfg.init_scale);
  cfg.hidden = j.value("hidden", cfg.hidden);
  return cfg;
}

std::size_t LabeledDataset::positives() const {
  return static_cast<std::size_t>(
      std::count_if(items.begin(), items.end(), [](const LabeledSpec& s) { return s.label == 1; }));
}

RnnParams init_params(std::size_t hidden, double init_scale, Rng& rng) {
  RnnParams params(hidden);
  for (double& x : params.theta()) x = uniform_real(rng, -init_scale, init_scale);
  return params;
}

TrainResult train(const LabeledDataset& data, const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0) || cfg.epochs <= 0 || cfg.batch <= 0 || !(cfg.init_scale > 0) ||
      cfg.hidden == 0) {
    throw ConfigError("train: every TrainConfig setting must be positive");
  }
  const std::size_t pos = data.positives();
  if (pos == 0 || pos == data.items.size()) {
    throw DegenerateDataError("train: dataset needs both classes (" + std::to_string(pos) +
                              " positives of " + std::to_string(data.items.size()) + ")");
  }
  std::vector<LabeledSeq> seqs;
  seqs.reserve(data.items.size());
  for (const auto& item : data.items) {
    seqs.push_back({encode(canonical_form(item.spec)), item.label});
  }

  Rng rng(cfg.seed);
  TrainResult result{init_params(cfg.hidden, cfg.init_scale, rng), {}};
  std::vector<std::size_t> order(seqs.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<LabeledSeq> batch;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[uniform_index(rng, i)]);
    }
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch)) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch));
      batch.clear();
      for (std::size_t k = start; k < stop; ++k) batch.push_back(seqs[order[k]]);
      const auto lg = loss_and_grad(result.params, batch);
      kernels::axpy(-cfg.learning_rate, lg.grad, result.params.theta());
    }
    result.loss_history.push_back(loss_and_grad(result.params, seqs).loss);
  }
  return result;
}

double predict(const RnnParams& params, const ModelSpec& spec) {
  return forward(params, encode(canonical_form(spec)));
}

double binary_accuracy(const RnnParams& params, const std::vector<LabeledSpec>& items) {
  if (items.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& item : items) {
    correct += (predict(params, item.spec) > 0.5 ? 1 : 0) == item.label;
  }
  return static_cast<double>(correct) / static_cast<double>(items.size());
}

nlohmann::json TrainedPredictor::to_json() const {
  const std::size_t hidden = params.hidden();
  auto matrix = [](std::span<const double> flat, std::size_t rows, std::size_t cols) {
    nlohmann::json m = nlohmann::json::array();
    for (std::size_t r = 0; r < rows; ++r) {
      m.push_back(std::vector<double>(flat.begin() + static_cast<std::ptrdiff_t>(r * cols),
                                      flat.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols)));
    }
    return m;
  };
  auto vec = [](std::span<const double> v) { return std::vector<double>(v.begin(), v.end()); };
  return {{"hidden", hidden},
          {"alphabet", kAlphabetSize},
          {"W_x", matrix(params.w_x(), hidden, kAlphabetSize)},
          {"W_h", matrix(params.w_h(), hidden, hidden)},
          {"b_h", vec(params.b_h())},
          {"w_o", vec(params.w_o())},
          {"b_o", params.b_o()},
          {"threshold_used", threshold_used},
          {"train_seed", train_seed}};
}

TrainedPredictor TrainedPredictor::from_json(const nlohmann::json& j) {
  try {
    const auto hidden = j.at("hidden").get<std::size_t>();
    if (j.at("alphabet").get<std::size_t>() != kAlphabetSize) {
      throw ShapeError("predictor file: alphabet must be 6");
    }
    TrainedPredictor out{RnnParams(hidden), j.at("threshold_used").get<double>(),
                         j.at("train_seed").get<std::uint64_t>()};
    auto fill_matrix = [](const nlohmann::json& m, std::size_t rows, std::size_t cols,
                          std::span<double> dst, const char* name) {
      if (!m.is_array() || m.size() != rows) throw ShapeError(std::string("predictor file: bad ") + name);
      for (std::size_t r = 0; r < rows; ++r) {
        const auto row = m[r].get<std::vector<double>>();
        if (row.size() != cols) throw ShapeError(std::string("predictor file: bad ") + name);
        std::copy(row.begin(), row.end(), dst.begin() + static_cast<std::ptrdiff_t>(r * cols));
      }
    };
    auto fill_vector = [](const nlohmann::json& v, std::span<double> dst, const char* name) {
      const auto vals = v.get<std::vector<double>>();
      if (vals.size() != dst.size()) throw ShapeError(std::string("predictor file: bad ") + name);
      std::copy(vals.begin(), vals.end(), dst.begin());
    };
    fill_matrix(j.at("W_x"), hidden, kAlphabetSize, out.params.w_x(), "W_x");
    fill_matrix(j.at("W_h"), hidden, hidden, out.params.w_h(), "W_h");
    fill_vector(j.at("b_h"), out.params.b_h(), "b_h");
    fill_vector(j.at("w_o"), out.params.w_o(), "w_o");
    out.params.b_o() = j.at("b_o").get<double>();
    if (!out.params.all_finite()) throw ShapeError("predictor file: non-finite weight");
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ShapeError(std::string("predictor file: ") + e.what());
  }
}

}  // namespace nasp
