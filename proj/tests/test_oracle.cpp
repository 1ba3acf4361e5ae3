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


#include <cmath>
#include <sstream>

#include "doctest.h"
#include "nasp/errors.hpp"
#include "nasp/oracle.hpp"
#include "support.hpp"

using namespace nasp;
using namespace nasp::testing;

namespace {

std::string table_line(const ModelSpec& s, double acc, double t) {
  std::ostringstream os;
  write_table_line(os, s, BenchmarkRecord{canonical_hash(s), acc, t});
  return os.str();
}

const ModelSpec kChainC3 = cell(3, {{0, 1}, {1, 2}}, {IN, C3, OUT});
const ModelSpec kChainC1 = cell(3, {{0, 1}, {1, 2}}, {IN, C1, OUT});

}  // namespace

TEST_SUITE("synthetic") {
  TEST_CASE("two-vertex cell before jitter") {
    SyntheticOracleParams p;
    p.jitter_scale = 0.0;
    const auto r = synth_record(two_vertex(), p);
    CHECK(r.val_accuracy == doctest::Approx(0.631).epsilon(1e-12));
    CHECK(r.train_time_s == 240.0);
  }

  TEST_CASE("two-vertex cell with jitter") {
    const auto h = canonical_hash(two_vertex());
    const double jitter = (static_cast<double>(h.prefix64()) / 18446744073709551616.0 - 0.5) * 0.02;
    const auto r = synth_record(two_vertex(), SyntheticOracleParams{});
    CHECK(std::abs(r.val_accuracy - (0.631 + jitter)) < 1e-15);
    // Independent reference value (tests/oracles/space_reference.py).
    CHECK(std::abs(r.val_accuracy - 0.6353959176345894) < 1e-15);
    CHECK(r.spec_hash == h);
  }

  TEST_CASE("frozen reference records") {
    const auto c1 = synth_record(kChainC1, {});
    CHECK(std::abs(c1.val_accuracy - 0.6754436434516273) < 1e-15);
    CHECK(c1.train_time_s == 430.0);
    const auto opt = synth_record(optimum_5_9(), {});
    CHECK(std::abs(opt.val_accuracy - 0.8055015586928765) < 1e-15);
    CHECK(opt.train_time_s == 1260.0);
  }

  TEST_CASE("deterministic and a function of the class") {
    CHECK(synth_record(kChainC3, {}).val_accuracy == synth_record(kChainC3, {}).val_accuracy);
    const auto p = cell(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}, {IN, C3, C1, OUT});
    const auto q = cell(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}, {IN, C1, C3, OUT});
    const auto a = synth_record(p, {});
    const auto b = synth_record(q, {});
    CHECK(a.val_accuracy == b.val_accuracy);
    CHECK(a.train_time_s == b.train_time_s);
  }

  TEST_CASE("clamped") {
    SyntheticOracleParams hi;
    hi.acc_base = 3.0;
    CHECK(synth_record(optimum_5_9(), hi).val_accuracy == 0.95);
    SyntheticOracleParams lo;
    lo.acc_base = -3.0;
    CHECK(synth_record(optimum_5_9(), lo).val_accuracy == 0.0);
  }

  TEST_CASE("rejects invalid specs") {
    CHECK_THROWS_AS(synth_record(cell(3, {{0, 2}}, {IN, C3, OUT}), {}), InvalidSpecError);
  }

  TEST_CASE("unique optimum of (5,9)") {
    const auto specs = enumerate_space({5, 9});
    std::vector<double> accs;
    double best = -1.0;
    int best_count = 0;
    const ModelSpec* arg = nullptr;
    for (const auto& s : specs) {
      const double a = synth_record(s, {}).val_accuracy;
      accs.push_back(a);
      if (a > best) {
        best = a;
        best_count = 1;
        arg = &s;
      } else if (a == best) {
        ++best_count;
      }
    }
    CHECK(best_count == 1);
    REQUIRE(arg != nullptr);
    CHECK(canonical_hash(*arg).hex() == "d3384eb9f24b95eab5b0f31c840cfb68");
    CHECK(std::abs(best - 0.8055015586928765) < 1e-15);
    CHECK(std::abs(quantile(accs, 0.9) - 0.7670835393823467) < 1e-15);
  }

  TEST_CASE("params json round trip") {
    SyntheticOracleParams p;
    p.acc_per_edge = -0.0123;
    p.time_base = 17.0;
    const auto q = SyntheticOracleParams::from_json(p.to_json());
    CHECK(q.acc_per_edge == p.acc_per_edge);
    CHECK(q.time_base == p.time_base);
    CHECK(q.to_json() == p.to_json());
  }
}

TEST_SUITE("load_table") {
  TEST_CASE("empty input") {
    std::istringstream in("");
    CHECK(load_table(in).size() == 0);
  }

  TEST_CASE("three records round trip") {
    std::istringstream in(table_line(two_vertex(), 0.5, 10) + "\n" + table_line(kChainC3, 0.6, 20) +
                          table_line(kChainC1, 0.7, 30));
    const auto t = load_table(in);
    CHECK(t.size() == 3);
    REQUIRE(t.find(canonical_hash(kChainC1)) != nullptr);
    CHECK(t.find(canonical_hash(kChainC1))->val_accuracy == 0.7);
    CHECK(t.find(canonical_hash(kChainC3))->train_time_s == 20);
    CHECK(t.best()->spec_hash == canonical_hash(kChainC1));
  }

  TEST_CASE("range errors name the line") {
    std::istringstream in(table_line(two_vertex(), 0.5, 10) + table_line(kChainC3, 1.2, 20));
    try {
      load_table(in);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    std::istringstream neg(table_line(two_vertex(), 0.5, -1));
    CHECK_THROWS_AS(load_table(neg), ParseError);
  }

  TEST_CASE("syntax and spec errors") {
    std::istringstream bad("{not json}\n");
    CHECK_THROWS_AS(load_table(bad), ParseError);
    std::istringstream missing(R"({"spec":{"v":2,"edges":[[0,1]],"ops":["in","out"]},"val_accuracy":0.5})");
    CHECK_THROWS_AS(load_table(missing), ParseError);
    std::istringstream unpruned(
        R"({"spec":{"v":3,"edges":[[0,2]],"ops":["in","conv3x3","out"]},"val_accuracy":0.5,"train_time_s":1})");
    CHECK_THROWS_AS(load_table(unpruned), ParseError);
  }

  TEST_CASE("duplicates by class") {
    const auto p = cell(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}, {IN, C3, C1, OUT});
    const auto q = cell(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}, {IN, C1, C3, OUT});
    std::istringstream in(table_line(p, 0.5, 1) + table_line(q, 0.6, 2));
    CHECK_THROWS_AS(load_table(in), DuplicateHashError);
  }

  TEST_CASE("missing file") {
    CHECK_THROWS_AS(load_table(std::string("/nonexistent/table.jsonl")), ParseError);
  }
}

TEST_SUITE("query") {
  TEST_CASE("charges") {
    const Oracle o = Oracle::synthetic({});
    SimClock clock;
    o.query(two_vertex(), clock, 0.0);
    CHECK(clock.elapsed_s() == 0.0);
    o.query(two_vertex(), clock, 1.0);
    CHECK(clock.elapsed_s() == 240.0);
    o.query(two_vertex(), clock, 0.25);
    CHECK(clock.elapsed_s() == 300.0);
    CHECK_THROWS_AS(o.query(two_vertex(), clock, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(o.query(two_vertex(), clock, -0.1), std::invalid_argument);
  }

  TEST_CASE("additive over a table") {
    std::istringstream in(table_line(two_vertex(), 0.5, 240) + table_line(kChainC3, 0.6, 500));
    const Oracle o = Oracle::from_table(load_table(in));
    SimClock clock;
    CHECK(o.query(two_vertex(), clock, 1.0).val_accuracy == 0.5);
    CHECK(o.query(kChainC3, clock, 1.0).val_accuracy == 0.6);
    CHECK(clock.elapsed_s() == 740.0);
    CHECK_THROWS_AS(o.query(kChainC1, clock, 1.0), UnknownArchitectureError);
    CHECK(clock.elapsed_s() == 740.0);
  }

  TEST_CASE("generated table matches the synthetic oracle") {
    std::stringstream file;
    const auto specs = enumerate_space({4, 9});
    for (const auto& s : specs) write_table_line(file, s, synth_record(s, {}));
    const Oracle table = Oracle::from_table(load_table(file));
    const Oracle synth = Oracle::synthetic({});
    CHECK(table.table()->size() == specs.size());
    for (const auto& s : specs) {
      CHECK(table.lookup(s).val_accuracy == synth.lookup(s).val_accuracy);
      CHECK(table.lookup(s).train_time_s == synth.lookup(s).train_time_s);
    }
  }
}

TEST_SUITE("clock") {
  TEST_CASE("monotone under interleaved queries") {
    const Oracle o = Oracle::synthetic({});
    SimClock clock;
    Rng rng(3);
    double last = 0.0;
    for (int i = 0; i < 500; ++i) {
      o.query(random_spec(rng, {6, 9}), clock, uniform_unit(rng));
      CHECK(clock.elapsed_s() >= last);
      last = clock.elapsed_s();
    }
  }

  TEST_CASE("rejects negative and non-finite charges") {
    SimClock clock;
    CHECK_THROWS_AS(clock.advance(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(clock.advance(std::nan("")), std::invalid_argument);
    CHECK(clock.elapsed_s() == 0.0);
  }
}

TEST_SUITE("label") {
  TEST_CASE("examples") {
    CHECK(label({{}, 0.945, 0}, 0.90) == 1);
    CHECK(label({{}, 0.90, 0}, 0.90) == 0);
    CHECK(label({{}, 0.10, 0}, 0.90) == 0);
    CHECK(label({{}, 0.95, 0}) == 1);
  }

  TEST_CASE("monotone in accuracy") {
    for (double t : {0.0, 0.5, 0.9}) {
      int prev = 0;
      for (int k = 0; k <= 1000; ++k) {
        const int y = label({{}, k / 1000.0, 0}, t);
        CHECK(y >= prev);
        prev = y;
      }
    }
  }
}

TEST_CASE("nearest-rank quantile") {
  std::vector<double> v{5, 1, 9, 3, 7, 2, 8, 4, 10, 6};
  CHECK(quantile(v, 0.9) == 9);
  CHECK(quantile(v, 1.0) == 10);
  CHECK(quantile(v, 0.05) == 1);
  CHECK(quantile({4.0}, 0.5) == 4.0);
}
