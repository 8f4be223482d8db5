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

// Layered XOR packer for toy programs.
//
// Each layer encrypts the whole current image and appends a decrypt stub
// directly after it. The stub becomes the new entry: it decrypts the image
// in place with byte stores, clears the registers it used and jumps to the
// previous entry. Running a k-layer program therefore crosses k
// write-then-execute transitions.

#ifndef WAVELINE_PACKER_H_
#define WAVELINE_PACKER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "waveline/assembler.h"

namespace waveline::wave {

inline constexpr uint32_t kStubInstructions = 14;

struct StubInfo {
  uint32_t entry = 0;       // first stub instruction
  uint32_t size = 0;        // bytes
  uint32_t body_start = 0;  // decrypted range [body_start, body_end)
  uint32_t body_end = 0;
  uint8_t key = 0;
};

struct PackResult {
  ToyProgram program;
  std::vector<StubInfo> stubs;  // innermost layer first
};

// One key per layer, innermost first. Throws UsageError for an empty key
// list or a zero key, InputError when the packed image would overflow.
PackResult PackLayers(const ToyProgram& program, std::span<const uint8_t> keys);
ToyProgram Pack(const ToyProgram& program, std::span<const uint8_t> keys);

// Deterministic non-zero keys for `layers` layers.
std::vector<uint8_t> KeysFromSeed(uint64_t seed, int layers);

}  // namespace waveline::wave

#endif  // WAVELINE_PACKER_H_
