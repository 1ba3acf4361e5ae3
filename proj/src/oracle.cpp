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

#include "nasp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "nasp/errors.hpp"

namespace nasp {

void SimClock::advance(double seconds) {
  if (!(seconds >= 0.0) || !std::isfinite(seconds)) {
    throw std::invalid_argument("SimClock: charge must be finite and nonnegative");
  }
  elapsed_s_ += seconds;
}

nlohmann::json SyntheticOracleParams::to_json() const {
  return {{"acc_base", acc_base},
          {"acc_per_conv3x3", acc_per_conv3x3},
          {"acc_per_conv1x1", acc_per_conv1x1},
          {"acc_per_maxpool", acc_per_maxpool},
          {"acc_per_depth", acc_per_depth},
          {"acc_per_edge", acc_per_edge},
          {"acc_cap", acc_cap},
          {"jitter_scale", jitter_scale},
          {"time_base", time_base},
          {"time_per_conv3x3", time_per_conv3x3},
          {"time_per_conv1x1", time_per_conv1x1},
          {"time_per_maxpool", time_per_maxpool},
          {"time_per_edge", time_per_edge}};
}

SyntheticOracleParams SyntheticOracleParams::from_json(const nlohmann::json& j) {
  SyntheticOracleParams p;
  auto read = [&](const char* key, double& field) {
    if (j.contains(key)) field = j.at(key).get<double>();
  };
  read("acc_base", p.acc_base);
  read("acc_per_conv3x3", p.acc_per_conv3x3);
  read("acc_per_conv1x1", p.acc_per_conv1x1);
  read("acc_per_maxpool", p.acc_per_maxpool);
  read("acc_per_depth", p.acc_per_depth);
  read("acc_per_edge", p.acc_per_edge);
  read("acc_cap", p.acc_cap);
  read("jitter_scale", p.jitter_scale);
  read("time_base", p.time_base);
  read("time_per_conv3x3", p.time_per_conv3x3);
  read("time_per_conv1x1", p.time_per_conv1x1);
  read("time_per_maxpool", p.time_per_maxpool);
  read("time_per_edge", p.time_per_edge);
  return p;
}

BenchmarkRecord synth_record(const ModelSpec& spec, const SyntheticOracleParams& params) {
  const CanonicalHash hash = canonical_hash(spec);
  int n3 = 0;
  int n1 = 0;
  int np = 0;
  for (OpLabel op : spec.ops()) {
    n3 += op == OpLabel::kConv3x3;
    n1 += op == OpLabel::kConv1x1;
    np += op == OpLabel::kMaxPool3x3;
  }
  const int e = spec.edge_count();
  const int d = longest_path(spec);
  const double raw = params.acc_base + params.acc_per_conv3x3 * n3 +
                     params.acc_per_conv1x1 * n1 + params.acc_per_maxpool * np +
                     params.acc_per_depth * d + params.acc_per_edge * e;
  const double unit = static_cast<double>(hash.prefix64()) * 0x1.0p-64;
  const double jitter = (unit - 0.5) * params.jitter_scale;
  BenchmarkRecord record;
  record.spec_hash = hash;
  record.val_accuracy = std::clamp(raw + jitter, 0.0, params.acc_cap);
  record.train_time_s = params.time_base + params.time_per_conv3x3 * n3 +
                        params.time_per_conv1x1 * n1 + params.time_per_maxpool * np +
                        params.time_per_edge * e;
  return record;
}

void BenchmarkTable::insert(const BenchmarkRecord& record) {
  if (!records_.emplace(record.spec_hash, record).second) {
    throw DuplicateHashError("duplicate architecture " + record.spec_hash.hex());
  }
}

const BenchmarkRecord* BenchmarkTable::find(const CanonicalHash& hash) const {
  const auto it = records_.find(hash);
  return it == records_.end() ? nullptr : &it->second;
}

const BenchmarkRecord* BenchmarkTable::best() const {
  const BenchmarkRecord* out = nullptr;
  for (const auto& [hash, record] : records_) {
    if (out == nullptr || record.val_accuracy > out->val_accuracy ||
        (record.val_accuracy == out->val_accuracy && record.spec_hash < out->spec_hash)) {
      out = &record;
    }
  }
  return out;
}

BenchmarkTable load_table(std::istream& in) {
  BenchmarkTable table(TableSource::kFile);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    BenchmarkRecord record;
    try {
      const auto j = nlohmann::json::parse(line);
      const ModelSpec spec = spec_from_json(j.at("spec"));
      record.spec_hash = canonical_hash(spec);
      record.val_accuracy = j.at("val_accuracy").get<double>();
      record.train_time_s = j.at("train_time_s").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(lineno, e.what());
    } catch (const NaspError& e) {
      throw ParseError(lineno, e.what());
    }
    if (!(record.val_accuracy >= 0.0 && record.val_accuracy <= 1.0)) {
      throw ParseError(lineno, "val_accuracy outside [0, 1]");
    }
    if (!(record.train_time_s >= 0.0) || !std::isfinite(record.train_time_s)) {
      throw ParseError(lineno, "train_time_s must be a nonnegative number");
    }
    try {
      table.insert(record);
    } catch (const DuplicateHashError& e) {
      throw DuplicateHashError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return table;
}

BenchmarkTable load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path);
  return load_table(in);
}

void write_table_line(std::ostream& out, const ModelSpec& spec, const BenchmarkRecord& record) {
  const nlohmann::json j = {{"spec", spec_to_json(spec)},
                            {"val_accuracy", record.val_accuracy},
                            {"train_time_s", record.train_time_s}};
  out << j.dump() << '\n';
}

Oracle Oracle::from_table(BenchmarkTable table) { return Oracle(std::move(table)); }

Oracle Oracle::synthetic(SyntheticOracleParams params) { return Oracle(params); }

TableSource Oracle::source() const {
  return std::holds_alternative<BenchmarkTable>(backing_) ? TableSource::kFile
                                                          : TableSource::kSynthetic;
}

const BenchmarkTable* Oracle::table() const { return std::get_if<BenchmarkTable>(&backing_); }

const SyntheticOracleParams* Oracle::synthetic_params() const {
  return std::get_if<SyntheticOracleParams>(&backing_);
}

BenchmarkRecord Oracle::lookup(const ModelSpec& spec) const {
  if (const auto* params = std::get_if<SyntheticOracleParams>(&backing_)) {
    return synth_record(spec, *params);
  }
  const auto& table = std::get<BenchmarkTable>(backing_);
  const CanonicalHash hash = canonical_hash(spec);
  const BenchmarkRecord* record = table.find(hash);
  if (record == nullptr) throw UnknownArchitectureError("architecture " + hash.hex() + " not in table");
  return *record;
}

BenchmarkRecord Oracle::query(const ModelSpec& spec, SimClock& clock, double charge) const {
  if (!(charge >= 0.0 && charge <= 1.0)) {
    throw std::invalid_argument("Oracle::query: charge must lie in [0, 1]");
  }
  BenchmarkRecord record = lookup(spec);
  clock.advance(charge * record.train_time_s);
  return record;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty() || !(q > 0.0 && q <= 1.0)) {
    throw std::invalid_argument("quantile: empty sample or q outside (0, 1]");
  }
  std::sort(values.begin(), values.end());
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
  return values[std::max<std::size_t>(rank, 1) - 1];
}

}  // namespace nasp
