// Copyright 2026 The Waveline Authors. All Rights Reserved.
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

// Lineage inference: version identification (Phase I), greedy lineage tree
// construction (Phase II) and cross-edge insertion (Phase III), plus the
// graph model and its DOT/JSON exports.

#ifndef WAVELINE_LINEAGE_H_
#define WAVELINE_LINEAGE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "waveline/corpus.h"
#include "waveline/hashing.h"

namespace waveline::lineage {

using hashing::FunctionHash;
using hashing::HashKind;

inline constexpr size_t kDefaultCrossThreshold = 3;
inline constexpr double kDefaultFallbackSimilarity = 0.02;

// One family version: the samples sharing a program hash.
struct VersionNode {
  int id = 0;
  hashing::ProgramHash program_hash;    // function_hashes is F(v)
  std::vector<std::string> members;     // L(v), sorted
  std::vector<uint32_t> instruction_counts;  // aligned with F(v)

  const std::vector<FunctionHash>& functions() const {
    return program_hash.function_hashes;
  }
  const std::string& representative() const { return members.front(); }
};

enum class EdgeKind { kTree, kCross };

struct Edge {
  int src = 0;
  int dst = 0;
  size_t shared = 0;  // shared functions (tree) or shared added functions
  EdgeKind kind = EdgeKind::kTree;

  bool operator==(const Edge&) const = default;
};

struct LineageGraph {
  std::vector<VersionNode> nodes;  // nodes[i].id == i
  std::vector<Edge> edges;
  std::vector<int> insertion_order;  // Phase II order, a topological order

  std::vector<int> Roots() const;
  std::vector<int> Parents(int node) const;
  std::vector<int> Children(int node) const;
  bool IsAcyclic() const;
  // reach[a][b] is true when a is a strict ancestor of b.
  std::vector<std::vector<bool>> AncestorMatrix() const;
};

// Function-hash interning, the inverted index hash -> versions, and pairwise
// overlap counts (materialized on first use).
class SimilarityIndex {
 public:
  explicit SimilarityIndex(std::span<const VersionNode> nodes);

  size_t node_count() const { return node_functions_.size(); }
  size_t FunctionCount(int node) const { return node_functions_[node].size(); }
  // Interned, ascending function ids of a node.
  const std::vector<uint32_t>& FunctionIds(int node) const {
    return node_functions_[node];
  }
  std::optional<uint32_t> IdOf(const FunctionHash& h) const;

  // Exactly the versions whose F contains the function.
  const std::vector<int>& NodesWith(uint32_t function_id) const {
    return postings_[function_id];
  }
  std::vector<int> NodesWith(const FunctionHash& h) const;

  size_t Shared(int a, int b) const;
  uint64_t SharedInstructions(int a, int b) const;

 private:
  void MaterializePairs() const;

  std::unordered_map<FunctionHash, uint32_t, hashing::FunctionHashHasher> ids_;
  std::vector<uint32_t> instruction_count_;
  std::vector<std::vector<uint32_t>> node_functions_;
  std::vector<std::vector<int>> postings_;
  mutable bool pairs_ready_ = false;
  mutable std::vector<uint32_t> shared_;
  mutable std::vector<uint64_t> shared_insns_;
};

// Phase I. Samples with equal program hash form one version. Ids follow
// descending member count, then ascending program-hash hex.
std::vector<VersionNode> IdentifyVersions(
    std::span<const hashing::HashedSample> samples);
std::vector<VersionNode> IdentifyVersions(
    std::span<const corpus::SampleCorpus> samples, HashKind kind,
    const hashing::PrimeTable& table, const corpus::PaddingConfig& padding);

// Phase II. Root minimizes |F(v)| + mean symmetric difference to the other
// versions; then the outside version sharing the most functions with any tree
// version is attached, with ties broken by shared instructions, then by the
// latest-inserted parent. When no outside version reaches the fallback
// Jaccard similarity, the smallest one is attached to its most similar tree
// version, possibly through a zero-share edge.
LineageGraph BuildTree(std::vector<VersionNode> versions,
                       const SimilarityIndex& index,
                       double fallback_similarity = kDefaultFallbackSimilarity);

// Phase III. Drops zero-share edges, then visits versions in Phase II order
// and greedily covers each version's added functions with versions that are
// neither ancestors nor descendants, while a candidate covers more than
// `threshold` of them.
LineageGraph AddCrossEdges(LineageGraph tree, const SimilarityIndex& index,
                           size_t threshold = kDefaultCrossThreshold);

struct InferOptions {
  size_t cross_threshold = kDefaultCrossThreshold;
  double fallback_similarity = kDefaultFallbackSimilarity;
};

// Phases II and III over versions from Phase I.
LineageGraph InferLineage(std::vector<VersionNode> versions,
                          const InferOptions& options = {});

// Node label "|F|,|L|", edge label = shared count, cross-edges marked '*'.
std::string ExportDot(const LineageGraph& graph);

// {"nodes":[{"id","program_hash","n_functions","members"}],
//  "edges":[{"src","dst","shared","kind"}]}
// plus "provenance" when given.
std::string ExportJson(
    const LineageGraph& graph,
    const std::map<std::string, int>* provenance = nullptr);

// Just enough of a graph JSON file to compare orderings.
struct GraphTopology {
  std::vector<std::string> program_hashes;  // by node id
  std::vector<std::pair<int, int>> edges;
};

GraphTopology Topology(const LineageGraph& graph);
GraphTopology ParseGraphTopology(std::string_view json_text);

}  // namespace waveline::lineage

#endif  // WAVELINE_LINEAGE_H_
