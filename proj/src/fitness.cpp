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

#include "nasp/fitness.hpp"

namespace nasp {

std::string_view eval_mode_name(EvalMode mode) {
  return mode == EvalMode::kOracle ? "oracle" : "predictor";
}

Evaluation OracleFitness::evaluate(const ModelSpec& spec, SimClock& clock) {
  ++evaluations_;
  const BenchmarkRecord record = oracle_.lookup(spec);
  bool hit = false;
  if (memoize_) hit = !charged_.insert(record.spec_hash).second;
  if (hit) {
    ++memo_hits_;
  } else {
    clock.advance(charge_ * record.train_time_s);
  }
  return {record.val_accuracy, record.val_accuracy, hit};
}

Evaluation PredictorFitness::evaluate(const ModelSpec& spec, SimClock& /*clock*/) {
  ++evaluations_;
  return {predict(params_, spec), std::nullopt, false};
}

}  // namespace nasp
