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

// Ground-truth fitness: a benchmark table loaded from disk or a deterministic
// synthetic benchmark, plus the simulated clock that meters training time.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "nasp/cellspace.hpp"

namespace nasp {

struct BenchmarkRecord {
  CanonicalHash spec_hash;
  double val_accuracy = 0.0;
  double train_time_s = 0.0;
};

// Accumulates the training seconds that would have been spent.
class SimClock {
 public:
  double elapsed_s() const { return elapsed_s_; }
  // Throws std::invalid_argument on a negative or non-finite charge.
  void advance(double seconds);

 private:
  double elapsed_s_ = 0.0;
};

// Coefficients of the synthetic benchmark. Accuracy is a clamped linear
// function of op counts, depth and edge count plus a hash-derived jitter;
// training time is linear in op and edge counts.
struct SyntheticOracleParams {
  double acc_base = 0.62;
  double acc_per_conv3x3 = 0.045;
  double acc_per_conv1x1 = 0.030;
  double acc_per_maxpool = 0.010;
  double acc_per_depth = 0.015;
  double acc_per_edge = -0.004;
  double acc_cap = 0.95;
  double jitter_scale = 0.02;
  double time_base = 200.0;
  double time_per_conv3x3 = 300.0;
  double time_per_conv1x1 = 150.0;
  double time_per_maxpool = 60.0;
  double time_per_edge = 40.0;

  nlohmann::json to_json() const;
  static SyntheticOracleParams from_json(const nlohmann::json& j);
};

// Throws InvalidSpecError unless spec is pruned and valid.
BenchmarkRecord synth_record(const ModelSpec& spec, const SyntheticOracleParams& params);

enum class TableSource { kFile, kSynthetic };

class BenchmarkTable {
 public:
  explicit BenchmarkTable(TableSource source = TableSource::kFile) : source_(source) {}

  // Throws DuplicateHashError.
  void insert(const BenchmarkRecord& record);
  const BenchmarkRecord* find(const CanonicalHash& hash) const;
  std::size_t size() const { return records_.size(); }
  // Highest val_accuracy in the table; nullptr when empty.
  const BenchmarkRecord* best() const;
  TableSource source() const { return source_; }

 private:
  TableSource source_;
  std::unordered_map<CanonicalHash, BenchmarkRecord, CanonicalHashHasher> records_;
};

// One JSON object per line: {"spec": {...}, "val_accuracy": x, "train_time_s": t}.
// Hashes are recomputed from the spec. Blank lines are skipped.
BenchmarkTable load_table(std::istream& in);
BenchmarkTable load_table(const std::string& path);
void write_table_line(std::ostream& out, const ModelSpec& spec, const BenchmarkRecord& record);

class Oracle {
 public:
  static Oracle from_table(BenchmarkTable table);
  static Oracle synthetic(SyntheticOracleParams params);

  TableSource source() const;
  // Ground truth without a clock charge.
  BenchmarkRecord lookup(const ModelSpec& spec) const;
  // Ground truth; advances the clock by charge * train_time_s. charge must be
  // in [0, 1]. Throws UnknownArchitectureError on a table miss.
  BenchmarkRecord query(const ModelSpec& spec, SimClock& clock, double charge) const;

  const SyntheticOracleParams* synthetic_params() const;
  const BenchmarkTable* table() const;

 private:
  explicit Oracle(std::variant<BenchmarkTable, SyntheticOracleParams> backing)
      : backing_(std::move(backing)) {}

  std::variant<BenchmarkTable, SyntheticOracleParams> backing_;
};

inline constexpr double kDefaultLabelThreshold = 0.90;

// 1 iff val_accuracy is strictly above threshold.
inline int label(const BenchmarkRecord& record, double threshold = kDefaultLabelThreshold) {
  return record.val_accuracy > threshold ? 1 : 0;
}

// Nearest-rank quantile (q in (0, 1]) of a nonempty sample.
double quantile(std::vector<double> values, double q);

}  // namespace nasp
