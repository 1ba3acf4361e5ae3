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

#include "nasp/trace.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "nasp/errors.hpp"

namespace nasp {
namespace {

double running_max(double prev, double obs) {
  if (std::isnan(obs)) return prev;
  if (std::isnan(prev)) return obs;
  return std::max(prev, obs);
}

bool decreased(double prev, double cur) {
  if (std::isnan(prev)) return false;
  return std::isnan(cur) || cur < prev;
}

double parse_double(const std::string& s) {
  if (s == "nan") return kUnknown;
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw NaspError("trace: bad number '" + s + "'");
  }
  return x;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void SearchTrace::record(std::size_t index, double sim_seconds, double true_acc, double fitness) {
  TraceRow row{index, sim_seconds, true_acc, fitness};
  if (!rows_.empty()) {
    row.best_true_acc = running_max(rows_.back().best_true_acc, true_acc);
    row.best_fitness = running_max(rows_.back().best_fitness, fitness);
  }
  rows_.push_back(row);
}

void SearchTrace::check_monotone() const {
  for (std::size_t i = 1; i < rows_.size(); ++i) {
    const auto& a = rows_[i - 1];
    const auto& b = rows_[i];
    if (b.sim_seconds < a.sim_seconds || decreased(a.best_true_acc, b.best_true_acc) ||
        decreased(a.best_fitness, b.best_fitness)) {
      throw NaspError("trace: row " + std::to_string(i) + " breaks monotonicity");
    }
  }
}

std::optional<double> SearchTrace::first_time_reaching(double target) const {
  for (const auto& row : rows_) {
    if (!std::isnan(row.best_true_acc) && row.best_true_acc >= target - 1e-12) return row.sim_seconds;
  }
  return std::nullopt;
}

void SearchTrace::write_csv(std::ostream& out) const {
  out << "index,sim_seconds,best_true_acc,best_fitness\n";
  for (const auto& row : rows_) {
    out << row.index << ',' << format_double(row.sim_seconds) << ','
        << format_double(row.best_true_acc) << ',' << format_double(row.best_fitness) << '\n';
  }
}

SearchTrace SearchTrace::read_csv(std::istream& in) {
  SearchTrace trace;
  std::string line;
  if (!std::getline(in, line)) return trace;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell[4];
    for (auto& c : cell) {
      if (!std::getline(ss, c, ',')) throw NaspError("trace: short row '" + line + "'");
    }
    TraceRow row;
    row.index = static_cast<std::size_t>(std::stoull(cell[0]));
    row.sim_seconds = parse_double(cell[1]);
    row.best_true_acc = parse_double(cell[2]);
    row.best_fitness = parse_double(cell[3]);
    trace.rows_.push_back(row);
  }
  return trace;
}

}  // namespace nasp
