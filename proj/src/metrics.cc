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

#include "waveline/metrics.h"

#include <algorithm>
#include <map>

#include "waveline/error.h"

namespace waveline::metrics {

Ratio FunctionCoverage(const FunctionSetPair& p) {
  if (p.original.empty()) {
    throw UsageError("function coverage undefined for an empty original set");
  }
  size_t common = 0;
  for (const auto& h : p.unpacked) common += p.original.count(h);
  return Ratio{common, p.original.size()};
}

Ratio FunctionNoiseRatio(const FunctionSetPair& p) {
  if (p.unpacked.empty()) {
    throw UsageError("function noise ratio undefined for an empty unpacked set");
  }
  size_t noise = 0;
  for (const auto& h : p.unpacked) noise += p.original.count(h) == 0;
  return Ratio{noise, p.unpacked.size()};
}

FunctionSet SppFunctionSet(const corpus::SampleCorpus& sample,
                           const hashing::PrimeTable& table,
                           const corpus::PaddingConfig& padding) {
  FunctionSet out;
  for (const corpus::FunctionRecord& f : sample.functions) {
    if (auto norm = corpus::Normalize(f, padding)) {
      out.insert(hashing::SppHash(*norm, table));
    }
  }
  return out;
}

namespace {

std::vector<std::vector<bool>> Ancestry(const lineage::GraphTopology& g) {
  const size_t n = g.program_hashes.size();
  std::vector<std::vector<int>> children(n);
  for (const auto& [src, dst] : g.edges) children[src].push_back(dst);
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (size_t s = 0; s < n; ++s) {
    std::vector<int> stack = {static_cast<int>(s)};
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int c : children[v]) {
        if (!reach[s][c]) {
          reach[s][c] = true;
          stack.push_back(c);
        }
      }
    }
  }
  return reach;
}

// Ground-truth node index -> inferred node index, or -1.
std::vector<int> MatchNodes(const OrderedGraphPair& p) {
  std::map<std::string, int> inferred;
  for (size_t i = 0; i < p.inferred.program_hashes.size(); ++i) {
    inferred.emplace(p.inferred.program_hashes[i], static_cast<int>(i));
  }
  std::vector<int> match;
  for (const std::string& h : p.ground_truth.program_hashes) {
    auto it = inferred.find(h);
    match.push_back(it == inferred.end() ? -1 : it->second);
  }
  return match;
}

}  // namespace

Ratio PoAgreement(const OrderedGraphPair& p) {
  const auto truth = Ancestry(p.ground_truth);
  const auto inferred = Ancestry(p.inferred);
  const std::vector<int> match = MatchNodes(p);
  size_t total = 0, kept = 0;
  for (size_t a = 0; a < truth.size(); ++a) {
    for (size_t b = 0; b < truth.size(); ++b) {
      if (!truth[a][b]) continue;
      ++total;
      if (match[a] >= 0 && match[b] >= 0 && inferred[match[a]][match[b]]) {
        ++kept;
      }
    }
  }
  if (total == 0) {
    throw UsageError("partial-order agreement needs an ancestor pair");
  }
  return Ratio{kept, total};
}

Ratio PoPrecision(const OrderedGraphPair& p) {
  const auto truth = Ancestry(p.ground_truth);
  const auto inferred = Ancestry(p.inferred);
  const std::vector<int> match = MatchNodes(p);
  size_t total = 0, kept = 0;
  for (size_t a = 0; a < truth.size(); ++a) {
    for (size_t b = 0; b < truth.size(); ++b) {
      if (a == b || match[a] < 0 || match[b] < 0) continue;
      if (!inferred[match[a]][match[b]]) continue;
      ++total;
      if (truth[a][b]) ++kept;
    }
  }
  if (total == 0) {
    throw UsageError("partial-order precision needs an inferred ancestor pair");
  }
  return Ratio{kept, total};
}

}  // namespace waveline::metrics
