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

// The labeled-DAG cell search space: vertex 0 is the input, the last vertex
// is the output, interior vertices carry one of three operations, and edges
// only run from lower to higher index.

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "nasp/rng.hpp"

namespace nasp {

enum class OpLabel : std::uint8_t {
  kIn = 0,
  kOut = 1,
  kConv3x3 = 2,
  kConv1x1 = 3,
  kMaxPool3x3 = 4,
};

inline constexpr std::array<OpLabel, 3> kInteriorOps{OpLabel::kConv3x3, OpLabel::kConv1x1,
                                                     OpLabel::kMaxPool3x3};

std::string_view op_name(OpLabel op);
// Throws InvalidSpecError for an unknown name.
OpLabel op_from_name(std::string_view name);
inline bool is_interior_op(OpLabel op) {
  return op == OpLabel::kConv3x3 || op == OpLabel::kConv1x1 || op == OpLabel::kMaxPool3x3;
}

struct SpaceLimits {
  int max_vertices = 7;
  int max_edges = 9;

  // Throws ConfigError unless max_vertices >= 2 and max_edges >= 1.
  void check() const;
  friend bool operator==(const SpaceLimits&, const SpaceLimits&) = default;
};

class ModelSpec {
 public:
  using Edge = std::pair<int, int>;

  // Throws MalformedSpecError if sizes disagree, v < 2, or any edge is not
  // strictly upper-triangular.
  ModelSpec(int num_vertices, std::vector<std::uint8_t> adjacency, std::vector<OpLabel> ops);
  static ModelSpec from_edges(int num_vertices, const std::vector<Edge>& edges,
                              std::vector<OpLabel> ops);

  int num_vertices() const { return num_vertices_; }
  bool has_edge(int from, int to) const {
    return adjacency_[static_cast<std::size_t>(from * num_vertices_ + to)] != 0;
  }
  OpLabel op(int vertex) const { return ops_[static_cast<std::size_t>(vertex)]; }
  const std::vector<OpLabel>& ops() const { return ops_; }
  const std::vector<std::uint8_t>& adjacency() const { return adjacency_; }
  int edge_count() const;
  // Sorted lexicographically.
  std::vector<Edge> edges() const;

  ModelSpec with_edge_flipped(int from, int to) const;
  ModelSpec with_op(int vertex, OpLabel op) const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;

 private:
  int num_vertices_;
  std::vector<std::uint8_t> adjacency_;  // row-major v*v
  std::vector<OpLabel> ops_;
};

// 128-bit digest identifying an isomorphism class of valid cells.
struct CanonicalHash {
  std::array<std::uint8_t, 16> bytes{};

  std::string hex() const;
  // Throws InvalidSpecError on malformed input.
  static CanonicalHash from_hex(std::string_view hex);
  // First 8 bytes read big-endian.
  std::uint64_t prefix64() const;

  friend auto operator<=>(const CanonicalHash&, const CanonicalHash&) = default;
};

struct CanonicalHashHasher {
  std::size_t operator()(const CanonicalHash& h) const noexcept {
    return static_cast<std::size_t>(h.prefix64());
  }
};

enum class Violation {
  kTooManyVertices,
  kTooManyEdges,
  kBadTerminalOps,
  kNoInOutPath,
  kDanglingVertex,
};

std::string_view violation_name(Violation v);

struct ValidationReport {
  bool valid = true;
  std::vector<Violation> violations;

  bool has(Violation v) const;
};

ValidationReport validate(const ModelSpec& spec, const SpaceLimits& limits);

// Keeps the vertices that are both reachable from IN and co-reachable from
// OUT, renumbered in order. Throws InvalidSpecError if the terminals are not
// IN/OUT and NoPathError if OUT is unreachable.
ModelSpec prune(const ModelSpec& spec);

// Requires a pruned, valid spec (any size); throws InvalidSpecError
// otherwise.
CanonicalHash canonical_hash(const ModelSpec& spec);

// Among all relabelings of the interior vertices that keep the adjacency
// upper-triangular, the one with the smallest byte serialization. Isomorphic
// specs share a canonical form.
ModelSpec canonical_form(const ModelSpec& spec);

// Rejection sampler over valid pruned specs. Throws ExhaustedError after
// kMaxRejections failed draws.
ModelSpec random_spec(Rng& rng, const SpaceLimits& limits);

enum class EditKind { kEdgeFlip, kOpChange, kInsertVertex };

// One primitive edit drawn uniformly from those applicable to the parent:
// flip an upper-triangular adjacency bit, change an interior op to a
// different label, or (while below max_vertices) split an edge i->j into
// i->k->j through a new interior vertex k with a random op, placed at index
// i + 1. Children that are invalid after pruning are redrawn.
struct MutationResult {
  ModelSpec unpruned;  // parent with exactly one primitive edit
  ModelSpec child;     // pruned, valid
  EditKind kind = EditKind::kEdgeFlip;
};

MutationResult mutate_detailed(const ModelSpec& parent, Rng& rng, const SpaceLimits& limits);
inline ModelSpec mutate(const ModelSpec& parent, Rng& rng, const SpaceLimits& limits) {
  return mutate_detailed(parent, rng, limits).child;
}

inline constexpr int kMaxRejections = 10'000;
inline constexpr int kMaxEnumerableVertices = 6;

// One canonical-form representative per isomorphism class of valid specs, in
// order of increasing vertex count then first discovery. Throws TooLargeError
// when max_vertices exceeds kMaxEnumerableVertices.
void enumerate_space(const SpaceLimits& limits,
                     const std::function<void(const ModelSpec&)>& visit);
std::vector<ModelSpec> enumerate_space(const SpaceLimits& limits);

// Binary form: version(1) | v | packed upper-triangular bits (MSB first) | op
// code per vertex.
std::vector<std::uint8_t> serialize(const ModelSpec& spec);
ModelSpec deserialize(const std::vector<std::uint8_t>& bytes);

// {"v": int, "edges": [[i, j], ...], "ops": ["in", ..., "out"]}
nlohmann::json spec_to_json(const ModelSpec& spec);
// Throws InvalidSpecError (or MalformedSpecError) on bad input.
ModelSpec spec_from_json(const nlohmann::json& j);

// Splits edge from->to through a new vertex with the given op at index
// from + 1.
ModelSpec insert_vertex(const ModelSpec& spec, int from, int to, OpLabel op);

// Longest IN->OUT path measured in edges.
int longest_path(const ModelSpec& spec);

namespace detail {

// The canonical hash algorithm over an arbitrary digraph (adjacency need not
// be upper-triangular). Used directly by permutation tests.
CanonicalHash graph_hash(int num_vertices, const std::vector<std::uint8_t>& adjacency,
                         const std::vector<OpLabel>& ops);

// BLAKE2b-128 over the length-prefixed concatenation of parts.
CanonicalHash hash_parts(const std::vector<std::vector<std::uint8_t>>& parts);

}  // namespace detail

}  // namespace nasp
