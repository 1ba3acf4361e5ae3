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

// Shared fixtures and brute-force reference implementations for the unit
// suites. Nothing here calls into the library's own canonicalization,
// validation or enumeration code.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "nasp/cellspace.hpp"

namespace nasp::testing {

inline constexpr OpLabel IN = OpLabel::kIn;
inline constexpr OpLabel OUT = OpLabel::kOut;
inline constexpr OpLabel C3 = OpLabel::kConv3x3;
inline constexpr OpLabel C1 = OpLabel::kConv1x1;
inline constexpr OpLabel MP = OpLabel::kMaxPool3x3;

inline ModelSpec cell(int v, const std::vector<ModelSpec::Edge>& edges, std::vector<OpLabel> ops) {
  return ModelSpec::from_edges(v, edges, std::move(ops));
}

inline ModelSpec two_vertex() { return cell(2, {{0, 1}}, {IN, OUT}); }

// The synthetic optimum of the (5,9) space.
inline ModelSpec optimum_5_9() {
  return cell(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}}, {IN, C3, C3, C3, OUT});
}

// Vertices lying on at least one IN->OUT path, found by enumerating every
// path explicitly.
inline std::vector<bool> on_some_path(const ModelSpec& s) {
  const int v = s.num_vertices();
  std::vector<bool> on(static_cast<std::size_t>(v), false);
  std::vector<int> path{0};
  auto walk = [&](auto&& self, int at) -> void {
    if (at == v - 1) {
      for (int x : path) on[static_cast<std::size_t>(x)] = true;
      return;
    }
    for (int next = at + 1; next < v; ++next) {
      if (!s.has_edge(at, next)) continue;
      path.push_back(next);
      self(self, next);
      path.pop_back();
    }
  };
  walk(walk, 0);
  return on;
}

// Valid in the sense of the search space, checked directly.
inline bool brute_valid(const ModelSpec& s, const SpaceLimits& limits) {
  if (s.num_vertices() > limits.max_vertices || s.edge_count() > limits.max_edges) return false;
  if (s.op(0) != IN || s.op(s.num_vertices() - 1) != OUT) return false;
  const auto on = on_some_path(s);
  return std::all_of(on.begin(), on.end(), [](bool b) { return b; });
}

// Isomorphism-class key: lexicographic minimum over interior relabelings of
// (sorted edge list, op list). Permutations need not keep the adjacency
// upper-triangular, so this is strictly coarser-grained than canonical_form.
using ClassKey = std::pair<std::vector<ModelSpec::Edge>, std::vector<OpLabel>>;

inline ClassKey class_key(const ModelSpec& s) {
  const int v = s.num_vertices();
  std::vector<int> inner(static_cast<std::size_t>(v - 2));
  std::iota(inner.begin(), inner.end(), 1);
  std::optional<ClassKey> best;
  do {
    std::vector<int> perm(static_cast<std::size_t>(v));
    perm.front() = 0;
    perm.back() = v - 1;
    std::copy(inner.begin(), inner.end(), perm.begin() + 1);
    ClassKey key;
    for (auto [a, b] : s.edges()) key.first.emplace_back(perm[a], perm[b]);
    std::sort(key.first.begin(), key.first.end());
    key.second.resize(static_cast<std::size_t>(v));
    for (int i = 0; i < v; ++i) key.second[static_cast<std::size_t>(perm[i])] = s.op(i);
    if (!best || key < *best) best = std::move(key);
  } while (std::next_permutation(inner.begin(), inner.end()));
  return *best;
}

// Every valid spec (not deduplicated) with 2..max_vertices vertices.
inline std::vector<ModelSpec> all_valid_specs(const SpaceLimits& limits) {
  std::vector<ModelSpec> out;
  for (int v = 2; v <= limits.max_vertices; ++v) {
    std::vector<ModelSpec::Edge> pairs;
    for (int i = 0; i < v; ++i)
      for (int j = i + 1; j < v; ++j) pairs.emplace_back(i, j);
    int combos = 1;
    for (int i = 0; i < v - 2; ++i) combos *= 3;
    for (std::uint32_t mask = 0; mask < (1u << pairs.size()); ++mask) {
      std::vector<ModelSpec::Edge> edges;
      for (std::size_t k = 0; k < pairs.size(); ++k)
        if (mask >> k & 1u) edges.push_back(pairs[k]);
      if (static_cast<int>(edges.size()) > limits.max_edges) continue;
      for (int c = 0; c < combos; ++c) {
        std::vector<OpLabel> ops{IN};
        for (int i = 0, rest = c; i < v - 2; ++i, rest /= 3) ops.push_back(kInteriorOps[rest % 3]);
        ops.push_back(OUT);
        ModelSpec s = cell(v, edges, std::move(ops));
        if (brute_valid(s, limits)) out.push_back(std::move(s));
      }
    }
  }
  return out;
}

// Valid specs grouped by brute-force isomorphism class.
inline std::map<ClassKey, std::vector<ModelSpec>> brute_classes(const SpaceLimits& limits) {
  std::map<ClassKey, std::vector<ModelSpec>> classes;
  for (auto& s : all_valid_specs(limits)) classes[class_key(s)].push_back(std::move(s));
  return classes;
}

// Arbitrary (possibly non-upper-triangular) relabeling: vertex i becomes perm[i].
inline std::vector<std::uint8_t> permuted_adjacency(const ModelSpec& s, const std::vector<int>& perm) {
  const int v = s.num_vertices();
  std::vector<std::uint8_t> adj(static_cast<std::size_t>(v * v), 0);
  for (auto [a, b] : s.edges()) adj[static_cast<std::size_t>(perm[a] * v + perm[b])] = 1;
  return adj;
}

inline std::vector<OpLabel> permuted_ops(const ModelSpec& s, const std::vector<int>& perm) {
  std::vector<OpLabel> ops(static_cast<std::size_t>(s.num_vertices()));
  for (int i = 0; i < s.num_vertices(); ++i) ops[static_cast<std::size_t>(perm[i])] = s.op(i);
  return ops;
}

}  // namespace nasp::testing
