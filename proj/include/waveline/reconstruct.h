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

// Function corpus reconstruction from a merged database.
//
// Entries are the program entry, the first instruction of every wave and
// every logged call target. A function's extent is what is reachable from
// its entry by following fall-through, jumps and conditional branches
// (calls fall through) until ret or hlt. Paths stop at any other entry,
// including stale copies that share an entry's original address, and at
// targets below the entry or outside the entry's segment.

#ifndef WAVELINE_RECONSTRUCT_H_
#define WAVELINE_RECONSTRUCT_H_

#include <string>
#include <vector>

#include "waveline/assembler.h"
#include "waveline/corpus.h"
#include "waveline/loader.h"

namespace waveline::wave {

struct ReconstructResult {
  corpus::SampleCorpus corpus;
  std::vector<std::string> diagnostics;
  size_t disassembled = 0;  // instructions reached from the logged seeds
};

ReconstructResult Reconstruct(const MergedDatabase& db,
                              std::span<const WaveArtifacts> waves,
                              std::string sample_id);

// The ground-truth corpus of an unpacked program: its declared functions
// plus the entry, with the same extent rules.
corpus::SampleCorpus ProgramCorpus(const ToyProgram& program,
                                   std::string sample_id);

}  // namespace waveline::wave

#endif  // WAVELINE_RECONSTRUCT_H_
