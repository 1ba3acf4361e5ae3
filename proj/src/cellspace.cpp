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

#include "nasp/cellspace.hpp"

#include <sodium.h>

#include <algorithm>
#include <bit>
#include <numeric>
#include <optional>
#include <unordered_set>

#include "nasp/errors.hpp"

namespace nasp {
namespace {

std::size_t idx(int v, int i, int j) { return static_cast<std::size_t>(i * v + j); }

// reach[i] = reachable from vertex 0 following edges forward.
std::vector<bool> forward_reach(int v, const std::vector<std::uint8_t>& adj) {
  std::vector<bool> seen(static_cast<std::size_t>(v), false);
  seen[0] = true;
  for (int i = 0; i < v; ++i) {
    if (!seen[static_cast<std::size_t>(i)]) continue;
    for (int j = i + 1; j < v; ++j) {
      if (adj[idx(v, i, j)]) seen[static_cast<std::size_t>(j)] = true;
    }
  }
  return seen;
}

// Vertices from which v-1 is reachable.
std::vector<bool> backward_reach(int v, const std::vector<std::uint8_t>& adj) {
  std::vector<bool> seen(static_cast<std::size_t>(v), false);
  seen[static_cast<std::size_t>(v - 1)] = true;
  for (int j = v - 1; j >= 0; --j) {
    if (!seen[static_cast<std::size_t>(j)]) continue;
    for (int i = 0; i < j; ++i) {
      if (adj[idx(v, i, j)]) seen[static_cast<std::size_t>(i)] = true;
    }
  }
  return seen;
}

bool terminals_ok(const ModelSpec& spec) {
  const int v = spec.num_vertices();
  if (spec.op(0) != OpLabel::kIn || spec.op(v - 1) != OpLabel::kOut) return false;
  for (int i = 1; i < v - 1; ++i) {
    if (!is_interior_op(spec.op(i))) return false;
  }
  return true;
}

// Valid ignoring the vertex/edge budget.
bool structurally_valid(const ModelSpec& spec) {
  if (!terminals_ok(spec)) return false;
  const auto fwd = forward_reach(spec.num_vertices(), spec.adjacency());
  const auto bwd = backward_reach(spec.num_vertices(), spec.adjacency());
  for (std::size_t i = 0; i < fwd.size(); ++i) {
    if (!fwd[i] || !bwd[i]) return false;
  }
  return true;
}

std::vector<std::uint8_t> digest_bytes(const CanonicalHash& h) {
  return {h.bytes.begin(), h.bytes.end()};
}

std::vector<std::uint8_t> concat_sorted(std::vector<CanonicalHash> digests) {
  std::sort(digests.begin(), digests.end());
  std::vector<std::uint8_t> out;
  out.reserve(digests.size() * 16);
  for (const auto& d : digests) out.insert(out.end(), d.bytes.begin(), d.bytes.end());
  return out;
}

// Relabels interior vertices: new vertex perm[i] takes old vertex i.
ModelSpec relabel(const ModelSpec& spec, const std::vector<int>& perm) {
  const int v = spec.num_vertices();
  std::vector<std::uint8_t> adj(static_cast<std::size_t>(v * v), 0);
  std::vector<OpLabel> ops(static_cast<std::size_t>(v));
  for (int i = 0; i < v; ++i) {
    ops[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = spec.op(i);
    for (int j = 0; j < v; ++j) {
      if (spec.has_edge(i, j)) {
        adj[idx(v, perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)])] = 1;
      }
    }
  }
  return ModelSpec(v, std::move(adj), std::move(ops));
}

}  // namespace

std::string_view op_name(OpLabel op) {
  switch (op) {
    case OpLabel::kIn:
      return "in";
    case OpLabel::kOut:
      return "out";
    case OpLabel::kConv3x3:
      return "conv3x3";
    case OpLabel::kConv1x1:
      return "conv1x1";
    case OpLabel::kMaxPool3x3:
      return "maxpool3x3";
  }
  return "?";
}

OpLabel op_from_name(std::string_view name) {
  for (OpLabel op : {OpLabel::kIn, OpLabel::kOut, OpLabel::kConv3x3, OpLabel::kConv1x1,
                     OpLabel::kMaxPool3x3}) {
    if (op_name(op) == name) return op;
  }
  throw InvalidSpecError("unknown op label '" + std::string(name) + "'");
}

void SpaceLimits::check() const {
  if (max_vertices < 2) throw ConfigError("max_vertices must be >= 2");
  if (max_edges < 1) throw ConfigError("max_edges must be >= 1");
}

ModelSpec::ModelSpec(int num_vertices, std::vector<std::uint8_t> adjacency,
                     std::vector<OpLabel> ops)
    : num_vertices_(num_vertices), adjacency_(std::move(adjacency)), ops_(std::move(ops)) {
  if (num_vertices_ < 2 || num_vertices_ > 255) {
    throw MalformedSpecError("vertex count out of range: " + std::to_string(num_vertices_));
  }
  const auto v = static_cast<std::size_t>(num_vertices_);
  if (adjacency_.size() != v * v) throw MalformedSpecError("adjacency size mismatch");
  if (ops_.size() != v) throw MalformedSpecError("ops length mismatch");
  for (std::size_t i = 0; i < v; ++i) {
    for (std::size_t j = 0; j < v; ++j) {
      auto& cell = adjacency_[i * v + j];
      if (cell != 0 && j <= i) {
        throw MalformedSpecError("edge " + std::to_string(i) + "->" + std::to_string(j) +
                                 " is not strictly upper-triangular");
      }
      cell = cell != 0 ? 1 : 0;
    }
  }
  for (OpLabel op : ops_) {
    if (static_cast<std::uint8_t>(op) > 4) throw MalformedSpecError("bad op code");
  }
}

ModelSpec ModelSpec::from_edges(int num_vertices, const std::vector<Edge>& edges,
                                std::vector<OpLabel> ops) {
  if (num_vertices < 2) throw MalformedSpecError("vertex count out of range");
  std::vector<std::uint8_t> adj(static_cast<std::size_t>(num_vertices * num_vertices), 0);
  for (const auto& [i, j] : edges) {
    if (i < 0 || j < 0 || i >= num_vertices || j >= num_vertices || i >= j) {
      throw MalformedSpecError("edge " + std::to_string(i) + "->" + std::to_string(j) +
                               " out of range or not upper-triangular");
    }
    adj[idx(num_vertices, i, j)] = 1;
  }
  return ModelSpec(num_vertices, std::move(adj), std::move(ops));
}

int ModelSpec::edge_count() const {
  return static_cast<int>(std::count(adjacency_.begin(), adjacency_.end(), 1));
}

std::vector<ModelSpec::Edge> ModelSpec::edges() const {
  std::vector<Edge> out;
  for (int i = 0; i < num_vertices_; ++i) {
    for (int j = i + 1; j < num_vertices_; ++j) {
      if (has_edge(i, j)) out.emplace_back(i, j);
    }
  }
  return out;
}

ModelSpec ModelSpec::with_edge_flipped(int from, int to) const {
  if (from < 0 || to >= num_vertices_ || from >= to) {
    throw MalformedSpecError("flip target not strictly upper-triangular");
  }
  auto adj = adjacency_;
  auto& cell = adj[idx(num_vertices_, from, to)];
  cell = cell ? 0 : 1;
  return ModelSpec(num_vertices_, std::move(adj), ops_);
}

ModelSpec ModelSpec::with_op(int vertex, OpLabel op) const {
  auto ops = ops_;
  ops.at(static_cast<std::size_t>(vertex)) = op;
  return ModelSpec(num_vertices_, adjacency_, std::move(ops));
}

std::string CanonicalHash::hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(32);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

CanonicalHash CanonicalHash::from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
  };
  if (hex.size() != 32) throw InvalidSpecError("hash must be 32 lowercase hex digits");
  CanonicalHash h;
  for (std::size_t i = 0; i < 16; ++i) {
    const int hi = nibble(hex[2 * i]);
    const int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw InvalidSpecError("hash must be 32 lowercase hex digits");
    h.bytes[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return h;
}

std::uint64_t CanonicalHash::prefix64() const {
  std::uint64_t x = 0;
  for (std::size_t i = 0; i < 8; ++i) x = x << 8 | bytes[i];
  return x;
}

std::string_view violation_name(Violation v) {
  switch (v) {
    case Violation::kTooManyVertices:
      return "TOO_MANY_VERTICES";
    case Violation::kTooManyEdges:
      return "TOO_MANY_EDGES";
    case Violation::kBadTerminalOps:
      return "BAD_TERMINAL_OPS";
    case Violation::kNoInOutPath:
      return "NO_IN_OUT_PATH";
    case Violation::kDanglingVertex:
      return "DANGLING_VERTEX";
  }
  return "?";
}

bool ValidationReport::has(Violation v) const {
  return std::find(violations.begin(), violations.end(), v) != violations.end();
}

ValidationReport validate(const ModelSpec& spec, const SpaceLimits& limits) {
  ValidationReport report;
  const int v = spec.num_vertices();
  if (v > limits.max_vertices) report.violations.push_back(Violation::kTooManyVertices);
  if (spec.edge_count() > limits.max_edges) report.violations.push_back(Violation::kTooManyEdges);
  if (!terminals_ok(spec)) report.violations.push_back(Violation::kBadTerminalOps);
  const auto fwd = forward_reach(v, spec.adjacency());
  const auto bwd = backward_reach(v, spec.adjacency());
  if (!fwd[static_cast<std::size_t>(v - 1)]) report.violations.push_back(Violation::kNoInOutPath);
  for (int i = 1; i < v - 1; ++i) {
    if (!fwd[static_cast<std::size_t>(i)] || !bwd[static_cast<std::size_t>(i)]) {
      report.violations.push_back(Violation::kDanglingVertex);
      break;
    }
  }
  report.valid = report.violations.empty();
  return report;
}

ModelSpec prune(const ModelSpec& spec) {
  const int v = spec.num_vertices();
  if (spec.op(0) != OpLabel::kIn || spec.op(v - 1) != OpLabel::kOut) {
    throw InvalidSpecError("prune: first/last vertex must be IN/OUT");
  }
  const auto fwd = forward_reach(v, spec.adjacency());
  if (!fwd[static_cast<std::size_t>(v - 1)]) throw NoPathError("prune: OUT unreachable from IN");
  const auto bwd = backward_reach(v, spec.adjacency());

  std::vector<int> keep;
  for (int i = 0; i < v; ++i) {
    if (fwd[static_cast<std::size_t>(i)] && bwd[static_cast<std::size_t>(i)]) keep.push_back(i);
  }
  const int n = static_cast<int>(keep.size());
  std::vector<std::uint8_t> adj(static_cast<std::size_t>(n * n), 0);
  std::vector<OpLabel> ops;
  ops.reserve(keep.size());
  for (int a = 0; a < n; ++a) {
    ops.push_back(spec.op(keep[static_cast<std::size_t>(a)]));
    for (int b = a + 1; b < n; ++b) {
      if (spec.has_edge(keep[static_cast<std::size_t>(a)], keep[static_cast<std::size_t>(b)])) {
        adj[idx(n, a, b)] = 1;
      }
    }
  }
  return ModelSpec(n, std::move(adj), std::move(ops));
}

namespace detail {

CanonicalHash hash_parts(const std::vector<std::vector<std::uint8_t>>& parts) {
  static const int sodium_ready = sodium_init();
  (void)sodium_ready;
  std::vector<std::uint8_t> buf;
  for (const auto& part : parts) {
    const auto len = static_cast<std::uint32_t>(part.size());
    for (int s = 0; s < 32; s += 8) buf.push_back(static_cast<std::uint8_t>(len >> s));
    buf.insert(buf.end(), part.begin(), part.end());
  }
  CanonicalHash out;
  crypto_generichash(out.bytes.data(), out.bytes.size(), buf.data(), buf.size(), nullptr, 0);
  return out;
}

CanonicalHash graph_hash(int num_vertices, const std::vector<std::uint8_t>& adjacency,
                         const std::vector<OpLabel>& ops) {
  const int v = num_vertices;
  std::vector<CanonicalHash> digest(static_cast<std::size_t>(v));
  for (int i = 0; i < v; ++i) {
    std::uint8_t in_deg = 0;
    std::uint8_t out_deg = 0;
    for (int j = 0; j < v; ++j) {
      in_deg += adjacency[idx(v, j, i)];
      out_deg += adjacency[idx(v, i, j)];
    }
    digest[static_cast<std::size_t>(i)] =
        hash_parts({{static_cast<std::uint8_t>(ops[static_cast<std::size_t>(i)])}, {in_deg}, {out_deg}});
  }
  for (int round = 0; round < v; ++round) {
    std::vector<CanonicalHash> next(digest.size());
    for (int i = 0; i < v; ++i) {
      std::vector<CanonicalHash> preds;
      std::vector<CanonicalHash> succs;
      for (int j = 0; j < v; ++j) {
        if (adjacency[idx(v, j, i)]) preds.push_back(digest[static_cast<std::size_t>(j)]);
        if (adjacency[idx(v, i, j)]) succs.push_back(digest[static_cast<std::size_t>(j)]);
      }
      next[static_cast<std::size_t>(i)] =
          hash_parts({digest_bytes(digest[static_cast<std::size_t>(i)]),
                      concat_sorted(std::move(preds)), concat_sorted(std::move(succs))});
    }
    digest = std::move(next);
  }
  return hash_parts({concat_sorted(digest), {static_cast<std::uint8_t>(v)}});
}

}  // namespace detail

CanonicalHash canonical_hash(const ModelSpec& spec) {
  if (!structurally_valid(spec)) {
    throw InvalidSpecError("canonical_hash: spec is not pruned and valid");
  }
  return detail::graph_hash(spec.num_vertices(), spec.adjacency(), spec.ops());
}

ModelSpec canonical_form(const ModelSpec& spec) {
  const int v = spec.num_vertices();
  std::vector<int> interior(static_cast<std::size_t>(v - 2));
  std::iota(interior.begin(), interior.end(), 1);
  std::vector<int> perm(static_cast<std::size_t>(v));
  std::optional<ModelSpec> best;
  std::vector<std::uint8_t> best_bytes;
  do {
    perm.front() = 0;
    perm.back() = v - 1;
    std::copy(interior.begin(), interior.end(), perm.begin() + 1);
    bool upper = true;
    for (int i = 0; i < v && upper; ++i) {
      for (int j = i + 1; j < v; ++j) {
        if (spec.has_edge(i, j) && perm[static_cast<std::size_t>(i)] >= perm[static_cast<std::size_t>(j)]) {
          upper = false;
          break;
        }
      }
    }
    if (!upper) continue;
    ModelSpec candidate = relabel(spec, perm);
    auto bytes = serialize(candidate);
    if (!best || bytes < best_bytes) {
      best_bytes = std::move(bytes);
      best.emplace(std::move(candidate));
    }
  } while (std::next_permutation(interior.begin(), interior.end()));
  return *best;
}

ModelSpec random_spec(Rng& rng, const SpaceLimits& limits) {
  limits.check();
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    const int v = 2 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(limits.max_vertices - 1)));
    std::vector<std::uint8_t> adj(static_cast<std::size_t>(v * v), 0);
    for (int i = 0; i < v; ++i) {
      for (int j = i + 1; j < v; ++j) adj[idx(v, i, j)] = coin(rng) ? 1 : 0;
    }
    std::vector<OpLabel> ops(static_cast<std::size_t>(v));
    ops.front() = OpLabel::kIn;
    ops.back() = OpLabel::kOut;
    for (int i = 1; i < v - 1; ++i) {
      ops[static_cast<std::size_t>(i)] = kInteriorOps[uniform_index(rng, kInteriorOps.size())];
    }
    const ModelSpec raw(v, std::move(adj), std::move(ops));
    if (!forward_reach(v, raw.adjacency())[static_cast<std::size_t>(v - 1)]) continue;
    ModelSpec pruned = prune(raw);
    if (validate(pruned, limits).valid) return pruned;
  }
  throw ExhaustedError("random_spec: no valid spec after " + std::to_string(kMaxRejections) +
                       " draws (limits too tight?)");
}

ModelSpec insert_vertex(const ModelSpec& spec, int from, int to, OpLabel op) {
  const int v = spec.num_vertices();
  const int n = v + 1;
  const int k = from + 1;
  auto shift = [&](int i) { return i >= k ? i + 1 : i; };
  std::vector<std::uint8_t> adj(static_cast<std::size_t>(n * n), 0);
  std::vector<OpLabel> ops(static_cast<std::size_t>(n));
  for (int i = 0; i < v; ++i) {
    ops[static_cast<std::size_t>(shift(i))] = spec.op(i);
    for (int j = i + 1; j < v; ++j) {
      if (spec.has_edge(i, j) && !(i == from && j == to)) adj[idx(n, shift(i), shift(j))] = 1;
    }
  }
  ops[static_cast<std::size_t>(k)] = op;
  adj[idx(n, from, k)] = 1;
  adj[idx(n, k, shift(to))] = 1;
  return ModelSpec(n, std::move(adj), std::move(ops));
}

MutationResult mutate_detailed(const ModelSpec& parent, Rng& rng, const SpaceLimits& limits) {
  limits.check();
  const int v = parent.num_vertices();
  const auto edges = parent.edges();
  const int flips = v * (v - 1) / 2;
  const int op_edits = 2 * (v - 2);
  const int inserts = v < limits.max_vertices
                          ? static_cast<int>(edges.size() * kInteriorOps.size())
                          : 0;
  const auto total = static_cast<std::uint64_t>(flips + op_edits + inserts);
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    auto pick = static_cast<int>(uniform_index(rng, total));
    std::optional<ModelSpec> edited;
    EditKind kind;
    if (pick < flips) {
      kind = EditKind::kEdgeFlip;
      for (int i = 0; i < v && !edited; ++i) {
        for (int j = i + 1; j < v; ++j) {
          if (pick-- == 0) {
            edited.emplace(parent.with_edge_flipped(i, j));
            break;
          }
        }
      }
    } else if ((pick -= flips) < op_edits) {
      kind = EditKind::kOpChange;
      const int vertex = 1 + pick / 2;
      // The two labels other than the current one, in kInteriorOps order.
      std::vector<OpLabel> others;
      for (OpLabel op : kInteriorOps) {
        if (op != parent.op(vertex)) others.push_back(op);
      }
      edited.emplace(parent.with_op(vertex, others.at(static_cast<std::size_t>(pick % 2))));
    } else {
      kind = EditKind::kInsertVertex;
      pick -= op_edits;
      const auto& [from, to] = edges[static_cast<std::size_t>(pick) / kInteriorOps.size()];
      edited.emplace(insert_vertex(parent, from, to,
                                   kInteriorOps[static_cast<std::size_t>(pick) % kInteriorOps.size()]));
    }
    const int ev = edited->num_vertices();
    if (!forward_reach(ev, edited->adjacency())[static_cast<std::size_t>(ev - 1)]) continue;
    ModelSpec child = prune(*edited);
    if (!validate(child, limits).valid) continue;
    return {std::move(*edited), std::move(child), kind};
  }
  throw ExhaustedError("mutate: no valid single-edit neighbour after " +
                       std::to_string(kMaxRejections) + " draws");
}

void enumerate_space(const SpaceLimits& limits,
                     const std::function<void(const ModelSpec&)>& visit) {
  limits.check();
  if (limits.max_vertices > kMaxEnumerableVertices) {
    throw TooLargeError("enumerate_space: max_vertices " + std::to_string(limits.max_vertices) +
                        " exceeds " + std::to_string(kMaxEnumerableVertices));
  }
  std::unordered_set<CanonicalHash, CanonicalHashHasher> seen;
  for (int v = 2; v <= limits.max_vertices; ++v) {
    std::vector<std::pair<int, int>> slots;
    for (int i = 0; i < v; ++i) {
      for (int j = i + 1; j < v; ++j) slots.emplace_back(i, j);
    }
    const std::uint32_t masks = 1u << slots.size();
    int op_combos = 1;
    for (int i = 0; i < v - 2; ++i) op_combos *= 3;
    for (std::uint32_t mask = 0; mask < masks; ++mask) {
      if (std::popcount(mask) > limits.max_edges) continue;
      std::vector<std::uint8_t> adj(static_cast<std::size_t>(v * v), 0);
      for (std::size_t s = 0; s < slots.size(); ++s) {
        if (mask >> s & 1u) adj[idx(v, slots[s].first, slots[s].second)] = 1;
      }
      const auto fwd = forward_reach(v, adj);
      const auto bwd = backward_reach(v, adj);
      bool connected = true;
      for (int i = 0; i < v; ++i) connected = connected && fwd[static_cast<std::size_t>(i)] && bwd[static_cast<std::size_t>(i)];
      if (!connected) continue;
      for (int combo = 0; combo < op_combos; ++combo) {
        std::vector<OpLabel> ops(static_cast<std::size_t>(v));
        ops.front() = OpLabel::kIn;
        ops.back() = OpLabel::kOut;
        int rest = combo;
        for (int i = 1; i < v - 1; ++i) {
          ops[static_cast<std::size_t>(i)] = kInteriorOps[static_cast<std::size_t>(rest % 3)];
          rest /= 3;
        }
        const ModelSpec spec(v, adj, std::move(ops));
        if (seen.insert(canonical_hash(spec)).second) visit(canonical_form(spec));
      }
    }
  }
}

std::vector<ModelSpec> enumerate_space(const SpaceLimits& limits) {
  std::vector<ModelSpec> out;
  enumerate_space(limits, [&](const ModelSpec& s) { out.push_back(s); });
  return out;
}

std::vector<std::uint8_t> serialize(const ModelSpec& spec) {
  const int v = spec.num_vertices();
  std::vector<std::uint8_t> out{1, static_cast<std::uint8_t>(v)};
  std::uint8_t cur = 0;
  int nbits = 0;
  for (int i = 0; i < v; ++i) {
    for (int j = i + 1; j < v; ++j) {
      cur = static_cast<std::uint8_t>(cur << 1 | (spec.has_edge(i, j) ? 1 : 0));
      if (++nbits == 8) {
        out.push_back(cur);
        cur = 0;
        nbits = 0;
      }
    }
  }
  if (nbits > 0) out.push_back(static_cast<std::uint8_t>(cur << (8 - nbits)));
  for (OpLabel op : spec.ops()) out.push_back(static_cast<std::uint8_t>(op));
  return out;
}

ModelSpec deserialize(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 2 || bytes[0] != 1) throw InvalidSpecError("deserialize: bad version tag");
  const int v = bytes[1];
  if (v < 2) throw InvalidSpecError("deserialize: vertex count < 2");
  const std::size_t nbits = static_cast<std::size_t>(v * (v - 1) / 2);
  const std::size_t nbytes = (nbits + 7) / 8;
  if (bytes.size() != 2 + nbytes + static_cast<std::size_t>(v)) {
    throw InvalidSpecError("deserialize: length mismatch");
  }
  std::vector<std::uint8_t> adj(static_cast<std::size_t>(v * v), 0);
  std::size_t bit = 0;
  for (int i = 0; i < v; ++i) {
    for (int j = i + 1; j < v; ++j, ++bit) {
      adj[idx(v, i, j)] = bytes[2 + bit / 8] >> (7 - bit % 8) & 1;
    }
  }
  std::vector<OpLabel> ops;
  for (std::size_t k = 2 + nbytes; k < bytes.size(); ++k) {
    if (bytes[k] > 4) throw InvalidSpecError("deserialize: bad op code");
    ops.push_back(static_cast<OpLabel>(bytes[k]));
  }
  return ModelSpec(v, std::move(adj), std::move(ops));
}

nlohmann::json spec_to_json(const ModelSpec& spec) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [i, j] : spec.edges()) edges.push_back({i, j});
  nlohmann::json ops = nlohmann::json::array();
  for (OpLabel op : spec.ops()) ops.push_back(std::string(op_name(op)));
  return {{"v", spec.num_vertices()}, {"edges", std::move(edges)}, {"ops", std::move(ops)}};
}

ModelSpec spec_from_json(const nlohmann::json& j) {
  try {
    const int v = j.at("v").get<int>();
    std::vector<ModelSpec::Edge> edges;
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw InvalidSpecError("edge must be [i, j]");
      edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    std::vector<OpLabel> ops;
    for (const auto& o : j.at("ops")) ops.push_back(op_from_name(o.get<std::string>()));
    return ModelSpec::from_edges(v, edges, std::move(ops));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidSpecError(std::string("spec object: ") + e.what());
  }
}

int longest_path(const ModelSpec& spec) {
  const int v = spec.num_vertices();
  std::vector<int> dist(static_cast<std::size_t>(v), -1);
  dist[0] = 0;
  for (int i = 0; i < v; ++i) {
    if (dist[static_cast<std::size_t>(i)] < 0) continue;
    for (int j = i + 1; j < v; ++j) {
      if (spec.has_edge(i, j)) {
        dist[static_cast<std::size_t>(j)] =
            std::max(dist[static_cast<std::size_t>(j)], dist[static_cast<std::size_t>(i)] + 1);
      }
    }
  }
  return dist[static_cast<std::size_t>(v - 1)];
}

}  // namespace nasp
