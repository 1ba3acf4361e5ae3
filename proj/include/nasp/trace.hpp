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

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace nasp {

inline constexpr double kUnknown = std::numeric_limits<double>::quiet_NaN();

struct TraceRow {
  std::size_t index = 0;
  double sim_seconds = 0.0;
  double best_true_acc = kUnknown;  // NaN until a true accuracy is known
  double best_fitness = kUnknown;
};

// Time-stamped best-so-far history of one run.
class SearchTrace {
 public:
  // Carries the best-so-far columns forward: a row's best values are the max
  // of the given observation and every earlier row. NaN observations leave
  // the running best unchanged.
  void record(std::size_t index, double sim_seconds, double true_acc, double fitness);

  const std::vector<TraceRow>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }
  const TraceRow& back() const { return rows_.back(); }

  // Throws NaspError if seconds or a best-so-far column ever decreases.
  void check_monotone() const;

  // Simulated seconds at the first row whose best true accuracy reaches
  // target (within 1e-12).
  std::optional<double> first_time_reaching(double target) const;

  // Header line then "index,sim_seconds,best_true_acc,best_fitness" rows.
  void write_csv(std::ostream& out) const;
  static SearchTrace read_csv(std::istream& in);

 private:
  std::vector<TraceRow> rows_;
};

// Fixed-format decimal used in traces (17 significant digits, "nan" for NaN).
std::string format_double(double x);

}  // namespace nasp
