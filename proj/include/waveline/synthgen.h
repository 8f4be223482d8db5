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

// Synthetic version histories with known lineage, emitted as sample corpora.
//
// Versions are sets of generated functions. Every function is unique by its
// mnemonic multiset, so versions with distinct sets never share a program
// hash. Each version is rendered as one or more polymorphic variants that
// differ in raw bytes but not in normalized content.

#ifndef WAVELINE_SYNTHGEN_H_
#define WAVELINE_SYNTHGEN_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "waveline/corpus.h"
#include "waveline/lineage.h"

namespace waveline::synth {

enum class Model { kStraight, kKLines, kDag };

std::optional<Model> ParseModel(std::string_view name);
std::string_view ModelName(Model model);

struct MutationMix {
  double add = 0.5;
  double remove = 0.2;
  double update = 0.3;
};

struct HistorySpec {
  Model model = Model::kStraight;
  int n_versions = 10;
  int lines = 2;   // kKLines
  int merges = 1;  // kDag
  MutationMix mix;
  double growth_bias = 2.0;  // multiplies the add weight
  int min_variants = 1;
  int max_variants = 1;
  uint64_t seed = 0;
};

struct SyntheticHistory {
  lineage::LineageGraph truth;  // node i is version i
  std::vector<corpus::SampleCorpus> corpora;
  std::map<std::string, int> provenance;  // sample id -> version
};

// Throws UsageError on contradictory or out-of-range specs.
void ValidateSpec(const HistorySpec& spec);

SyntheticHistory Generate(const HistorySpec& spec);

// Inserts padding into and reorders every function, then lays the sample
// out again. Raw bytes change; normalized content does not.
corpus::SampleCorpus VariantOf(const corpus::SampleCorpus& sample,
                               uint64_t seed);

// |F(v)| scaled root score of every version, as used by lineage inference.
std::vector<int64_t> RootScores(const std::vector<std::vector<int>>& sets);

}  // namespace waveline::synth

#endif  // WAVELINE_SYNTHGEN_H_
