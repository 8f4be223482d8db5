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

#include "waveline/lineage.h"

#include <algorithm>
#include <deque>
#include <limits>
#include <tuple>

#include "json.hpp"
#include "waveline/error.h"

namespace waveline::lineage {

// ---------------------------------------------------------------------------
// LineageGraph

std::vector<int> LineageGraph::Roots() const {
  std::vector<bool> has_parent(nodes.size(), false);
  for (const Edge& e : edges) has_parent[e.dst] = true;
  std::vector<int> roots;
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (!has_parent[i]) roots.push_back(static_cast<int>(i));
  }
  return roots;
}

std::vector<int> LineageGraph::Parents(int node) const {
  std::vector<int> out;
  for (const Edge& e : edges) {
    if (e.dst == node) out.push_back(e.src);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> LineageGraph::Children(int node) const {
  std::vector<int> out;
  for (const Edge& e : edges) {
    if (e.src == node) out.push_back(e.dst);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool LineageGraph::IsAcyclic() const {
  std::vector<int> indegree(nodes.size(), 0);
  std::vector<std::vector<int>> children(nodes.size());
  for (const Edge& e : edges) {
    ++indegree[e.dst];
    children[e.src].push_back(e.dst);
  }
  std::deque<int> ready;
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (indegree[i] == 0) ready.push_back(static_cast<int>(i));
  }
  size_t seen = 0;
  while (!ready.empty()) {
    int n = ready.front();
    ready.pop_front();
    ++seen;
    for (int c : children[n]) {
      if (--indegree[c] == 0) ready.push_back(c);
    }
  }
  return seen == nodes.size();
}

namespace {

std::vector<std::vector<int>> ChildLists(size_t n, std::span<const Edge> edges) {
  std::vector<std::vector<int>> children(n);
  for (const Edge& e : edges) children[e.src].push_back(e.dst);
  return children;
}

std::vector<bool> Reach(int start, const std::vector<std::vector<int>>& adj) {
  std::vector<bool> seen(adj.size(), false);
  std::vector<int> stack = {start};
  while (!stack.empty()) {
    int n = stack.back();
    stack.pop_back();
    for (int next : adj[n]) {
      if (!seen[next]) {
        seen[next] = true;
        stack.push_back(next);
      }
    }
  }
  return seen;
}

}  // namespace

std::vector<std::vector<bool>> LineageGraph::AncestorMatrix() const {
  auto children = ChildLists(nodes.size(), edges);
  std::vector<std::vector<bool>> reach;
  reach.reserve(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) {
    reach.push_back(Reach(static_cast<int>(i), children));
  }
  return reach;
}

// ---------------------------------------------------------------------------
// SimilarityIndex

SimilarityIndex::SimilarityIndex(std::span<const VersionNode> nodes) {
  node_functions_.resize(nodes.size());
  for (size_t n = 0; n < nodes.size(); ++n) {
    const VersionNode& node = nodes[n];
    if (node.id != static_cast<int>(n)) {
      throw InvariantError("version ids must be dense and ordered");
    }
    auto& fids = node_functions_[n];
    fids.reserve(node.functions().size());
    for (size_t i = 0; i < node.functions().size(); ++i) {
      const FunctionHash& h = node.functions()[i];
      auto [it, inserted] =
          ids_.emplace(h, static_cast<uint32_t>(instruction_count_.size()));
      if (inserted) {
        uint32_t count = i < node.instruction_counts.size()
                             ? node.instruction_counts[i]
                             : 0;
        instruction_count_.push_back(count);
        postings_.emplace_back();
      }
      fids.push_back(it->second);
      postings_[it->second].push_back(static_cast<int>(n));
    }
    std::sort(fids.begin(), fids.end());
  }
}

std::optional<uint32_t> SimilarityIndex::IdOf(const FunctionHash& h) const {
  auto it = ids_.find(h);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> SimilarityIndex::NodesWith(const FunctionHash& h) const {
  auto id = IdOf(h);
  if (!id) return {};
  return postings_[*id];
}

void SimilarityIndex::MaterializePairs() const {
  if (pairs_ready_) return;
  const size_t k = node_count();
  shared_.assign(k * k, 0);
  shared_insns_.assign(k * k, 0);
  for (size_t f = 0; f < postings_.size(); ++f) {
    const auto& nodes = postings_[f];
    const uint64_t insns = instruction_count_[f];
    for (size_t i = 0; i < nodes.size(); ++i) {
      const size_t a = nodes[i];
      for (size_t j = i + 1; j < nodes.size(); ++j) {
        const size_t b = nodes[j];
        ++shared_[a * k + b];
        ++shared_[b * k + a];
        shared_insns_[a * k + b] += insns;
        shared_insns_[b * k + a] += insns;
      }
    }
  }
  pairs_ready_ = true;
}

size_t SimilarityIndex::Shared(int a, int b) const {
  if (a == b) return FunctionCount(a);
  MaterializePairs();
  return shared_[static_cast<size_t>(a) * node_count() + b];
}

uint64_t SimilarityIndex::SharedInstructions(int a, int b) const {
  MaterializePairs();
  if (a == b) {
    uint64_t total = 0;
    for (uint32_t f : node_functions_[a]) total += instruction_count_[f];
    return total;
  }
  return shared_insns_[static_cast<size_t>(a) * node_count() + b];
}

// ---------------------------------------------------------------------------
// Phase I

namespace {

struct DigestHasher {
  size_t operator()(const Md5Digest& d) const {
    size_t h = 0;
    for (int i = 0; i < 8; ++i) h = (h << 8) | d[i];
    return h;
  }
};

}  // namespace

std::vector<VersionNode> IdentifyVersions(
    std::span<const hashing::HashedSample> samples) {
  std::unordered_map<Md5Digest, size_t, DigestHasher> group_of;
  std::vector<std::vector<size_t>> groups;
  group_of.reserve(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    auto [it, inserted] =
        group_of.emplace(samples[i].program.value, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(i);
  }

  std::vector<VersionNode> nodes;
  nodes.reserve(groups.size());
  for (const auto& group : groups) {
    VersionNode node;
    size_t rep = group.front();
    for (size_t i : group) {
      node.members.push_back(samples[i].sample_id);
      if (samples[i].sample_id < samples[rep].sample_id) rep = i;
    }
    std::sort(node.members.begin(), node.members.end());
    node.program_hash = samples[rep].program;
    node.instruction_counts = samples[rep].instruction_counts;
    nodes.push_back(std::move(node));
  }

  std::vector<std::string> hex(nodes.size());
  std::vector<size_t> order(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) {
    hex[i] = nodes[i].program_hash.Hex();
    order[i] = i;
  }
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (nodes[a].members.size() != nodes[b].members.size()) {
      return nodes[a].members.size() > nodes[b].members.size();
    }
    return hex[a] < hex[b];
  });
  std::vector<VersionNode> sorted;
  sorted.reserve(nodes.size());
  for (size_t i : order) {
    sorted.push_back(std::move(nodes[i]));
    sorted.back().id = static_cast<int>(sorted.size() - 1);
  }
  return sorted;
}

std::vector<VersionNode> IdentifyVersions(
    std::span<const corpus::SampleCorpus> samples, HashKind kind,
    const hashing::PrimeTable& table, const corpus::PaddingConfig& padding) {
  std::vector<hashing::HashedSample> hashed =
      hashing::HashSamples(samples, kind, table, padding);
  return IdentifyVersions(hashed);
}

// ---------------------------------------------------------------------------
// Phase II

namespace {

struct Attachment {
  int parent = -1;
  size_t shared = 0;
  uint64_t instructions = 0;
};

}  // namespace

LineageGraph BuildTree(std::vector<VersionNode> versions,
                       const SimilarityIndex& index,
                       double fallback_similarity) {
  LineageGraph graph;
  graph.nodes = std::move(versions);
  const int k = static_cast<int>(graph.nodes.size());
  if (static_cast<size_t>(k) != index.node_count()) {
    throw InvariantError("similarity index does not match the versions");
  }
  if (k == 0) return graph;

  std::vector<std::string> hex(k);
  std::vector<size_t> size(k);
  for (int v = 0; v < k; ++v) {
    hex[v] = graph.nodes[v].program_hash.Hex();
    size[v] = index.FunctionCount(v);
  }
  // Smaller first, hash order as the last resort.
  auto smaller = [&](int a, int b) {
    return std::tie(size[a], hex[a]) < std::tie(size[b], hex[b]);
  };

  // Root: minimize |F(v)| + sum_u |F(v) xor F(u)| / (k - 1), compared
  // exactly after scaling by k - 1.
  int root = 0;
  if (k > 1) {
    std::vector<int64_t> score(k, 0);
    for (int v = 0; v < k; ++v) {
      int64_t s = static_cast<int64_t>(k - 1) * static_cast<int64_t>(size[v]);
      for (int u = 0; u < k; ++u) {
        if (u == v) continue;
        s += static_cast<int64_t>(size[v] + size[u] - 2 * index.Shared(v, u));
      }
      score[v] = s;
    }
    for (int v = 1; v < k; ++v) {
      if (score[v] < score[root] ||
          (score[v] == score[root] && smaller(v, root))) {
        root = v;
      }
    }
  }

  std::vector<bool> in_tree(k, false);
  std::vector<Attachment> best(k);
  std::vector<bool> similar_enough(k, false);

  auto insert = [&](int v) {
    in_tree[v] = true;
    graph.insertion_order.push_back(v);
    for (int u = 0; u < k; ++u) {
      if (in_tree[u]) continue;
      const size_t shared = index.Shared(v, u);
      const uint64_t insns = index.SharedInstructions(v, u);
      Attachment& b = best[u];
      // v is now the latest-inserted node, so it wins exact ties.
      if (b.parent < 0 || shared > b.shared ||
          (shared == b.shared && insns >= b.instructions)) {
        b = Attachment{v, shared, insns};
      }
      const size_t uni = size[v] + size[u] - shared;
      if (uni > 0 && static_cast<double>(shared) >=
                         fallback_similarity * static_cast<double>(uni)) {
        similar_enough[u] = true;
      }
    }
  };

  insert(root);
  for (int step = 1; step < k; ++step) {
    bool any_similar = false;
    for (int u = 0; u < k; ++u) {
      if (!in_tree[u] && similar_enough[u]) any_similar = true;
    }
    int next = -1;
    for (int u = 0; u < k; ++u) {
      if (in_tree[u]) continue;
      if (next < 0) {
        next = u;
        continue;
      }
      if (any_similar) {
        const Attachment& a = best[u];
        const Attachment& b = best[next];
        if (a.shared != b.shared) {
          if (a.shared > b.shared) next = u;
        } else if (a.instructions != b.instructions) {
          if (a.instructions > b.instructions) next = u;
        } else if (smaller(u, next)) {
          next = u;
        }
      } else if (smaller(u, next)) {
        next = u;
      }
    }
    const Attachment& a = best[next];
    graph.edges.push_back(Edge{a.parent, next, a.shared, EdgeKind::kTree});
    insert(next);
  }
  return graph;
}

// ---------------------------------------------------------------------------
// Phase III

namespace {

std::vector<uint32_t> Difference(const std::vector<uint32_t>& a,
                                 const std::vector<uint32_t>& b) {
  std::vector<uint32_t> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

}  // namespace

LineageGraph AddCrossEdges(LineageGraph tree, const SimilarityIndex& index,
                           size_t threshold) {
  LineageGraph graph = std::move(tree);
  const int k = static_cast<int>(graph.nodes.size());
  std::erase_if(graph.edges, [](const Edge& e) { return e.shared == 0; });

  std::vector<int> tree_parent(k, -1);
  for (const Edge& e : graph.edges) {
    if (e.kind == EdgeKind::kTree) tree_parent[e.dst] = e.src;
  }
  std::vector<int> position(k, 0);
  for (size_t i = 0; i < graph.insertion_order.size(); ++i) {
    position[graph.insertion_order[i]] = static_cast<int>(i);
  }

  std::vector<std::vector<int>> children(k), parents(k);
  for (const Edge& e : graph.edges) {
    children[e.src].push_back(e.dst);
    parents[e.dst].push_back(e.src);
  }

  std::vector<uint32_t> counts(k, 0);
  std::vector<int> touched;
  for (int v : graph.insertion_order) {
    const int p = tree_parent[v];
    std::vector<uint32_t> added =
        p >= 0 ? Difference(index.FunctionIds(v), index.FunctionIds(p))
               : index.FunctionIds(v);
    if (added.size() <= threshold) continue;

    std::vector<bool> candidate(k, true);
    candidate[v] = false;
    std::vector<bool> desc = Reach(v, children);
    std::vector<bool> anc = Reach(v, parents);
    for (int c = 0; c < k; ++c) {
      if (desc[c] || anc[c]) candidate[c] = false;
    }

    while (added.size() > threshold) {
      touched.clear();
      for (uint32_t f : added) {
        for (int c : index.NodesWith(f)) {
          if (!candidate[c]) continue;
          if (counts[c]++ == 0) touched.push_back(c);
        }
      }
      int pick = -1;
      for (int c : touched) {
        if (pick < 0 || counts[c] > counts[pick] ||
            (counts[c] == counts[pick] && position[c] < position[pick])) {
          pick = c;
        }
      }
      const size_t covered = pick >= 0 ? counts[pick] : 0;
      for (int c : touched) counts[c] = 0;
      if (covered <= threshold) break;

      graph.edges.push_back(Edge{pick, v, covered, EdgeKind::kCross});
      children[pick].push_back(v);
      parents[v].push_back(pick);
      candidate[pick] = false;
      added = Difference(added, index.FunctionIds(pick));
    }
  }
  if (!graph.IsAcyclic()) {
    throw InvariantError("cross-edge insertion produced a cycle");
  }
  return graph;
}

LineageGraph InferLineage(std::vector<VersionNode> versions,
                          const InferOptions& options) {
  SimilarityIndex index(versions);
  LineageGraph tree =
      BuildTree(std::move(versions), index, options.fallback_similarity);
  return AddCrossEdges(std::move(tree), index, options.cross_threshold);
}

// ---------------------------------------------------------------------------
// Export

namespace {

std::vector<Edge> SortedEdges(const LineageGraph& graph) {
  std::vector<Edge> edges = graph.edges;
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.src, a.dst, a.kind) < std::tie(b.src, b.dst, b.kind);
  });
  return edges;
}

}  // namespace

std::string ExportDot(const LineageGraph& graph) {
  std::string out = "digraph lineage {\n";
  for (const VersionNode& node : graph.nodes) {
    out += "  v" + std::to_string(node.id) + " [label=\"" +
           std::to_string(node.functions().size()) + "," +
           std::to_string(node.members.size()) + "\"];\n";
  }
  for (const Edge& e : SortedEdges(graph)) {
    out += "  v" + std::to_string(e.src) + " -> v" + std::to_string(e.dst) +
           " [label=\"" + std::to_string(e.shared) +
           (e.kind == EdgeKind::kCross ? "*" : "") + "\"];\n";
  }
  out += "}\n";
  return out;
}

std::string ExportJson(const LineageGraph& graph,
                       const std::map<std::string, int>* provenance) {
  using nlohmann::ordered_json;
  ordered_json doc;
  ordered_json nodes = ordered_json::array();
  for (const VersionNode& node : graph.nodes) {
    ordered_json n;
    n["id"] = node.id;
    n["program_hash"] = node.program_hash.Hex();
    n["n_functions"] = node.functions().size();
    n["members"] = node.members;
    nodes.push_back(std::move(n));
  }
  ordered_json edges = ordered_json::array();
  for (const Edge& e : SortedEdges(graph)) {
    ordered_json j;
    j["src"] = e.src;
    j["dst"] = e.dst;
    j["shared"] = e.shared;
    j["kind"] = e.kind == EdgeKind::kTree ? "tree" : "cross";
    edges.push_back(std::move(j));
  }
  doc["nodes"] = std::move(nodes);
  doc["edges"] = std::move(edges);
  if (provenance) {
    ordered_json prov = ordered_json::object();
    for (const auto& [sample, version] : *provenance) prov[sample] = version;
    doc["provenance"] = std::move(prov);
  }
  return doc.dump(2) + "\n";
}

GraphTopology Topology(const LineageGraph& graph) {
  GraphTopology t;
  for (const VersionNode& node : graph.nodes) {
    t.program_hashes.push_back(node.program_hash.Hex());
  }
  for (const Edge& e : graph.edges) t.edges.emplace_back(e.src, e.dst);
  return t;
}

GraphTopology ParseGraphTopology(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("graph: invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array() ||
      !doc.contains("edges") || !doc["edges"].is_array()) {
    throw InputError("graph: expected object with 'nodes' and 'edges' arrays");
  }
  GraphTopology t;
  std::map<int64_t, int> index_of;
  for (const auto& n : doc["nodes"]) {
    if (!n.is_object() || !n.contains("id") || !n["id"].is_number_integer() ||
        !n.contains("program_hash") || !n["program_hash"].is_string()) {
      throw InputError("graph: node needs integer 'id' and 'program_hash'");
    }
    int64_t id = n["id"].get<int64_t>();
    if (!index_of.emplace(id, static_cast<int>(t.program_hashes.size()))
             .second) {
      throw InputError("graph: duplicate node id " + std::to_string(id));
    }
    t.program_hashes.push_back(n["program_hash"].get<std::string>());
  }
  for (const auto& e : doc["edges"]) {
    if (!e.is_object() || !e.contains("src") || !e.contains("dst") ||
        !e["src"].is_number_integer() || !e["dst"].is_number_integer()) {
      throw InputError("graph: edge needs integer 'src' and 'dst'");
    }
    auto src = index_of.find(e["src"].get<int64_t>());
    auto dst = index_of.find(e["dst"].get<int64_t>());
    if (src == index_of.end() || dst == index_of.end()) {
      throw InputError("graph: edge references an unknown node");
    }
    t.edges.emplace_back(src->second, dst->second);
  }
  return t;
}

}  // namespace waveline::lineage
