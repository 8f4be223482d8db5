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

// Random halting toy programs: a main routine that calls every function
// directly, functions of straight-line arithmetic and scratch-memory traffic
// with optional forward branches.

#ifndef WAVELINE_TOY_GEN_H_
#define WAVELINE_TOY_GEN_H_

#include <cstdint>
#include <string>

#include "waveline/assembler.h"

namespace waveline::wave {

inline constexpr uint32_t kScratchBase = 0xE000;

struct ToyGenOptions {
  int min_functions = 2;
  int max_functions = 6;
  uint32_t base = 0x400;
};

struct GeneratedProgram {
  std::string source;
  ToyProgram program;
};

GeneratedProgram RandomToyProgram(uint64_t seed, const ToyGenOptions& options = {});

}  // namespace waveline::wave

#endif  // WAVELINE_TOY_GEN_H_
