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

#include "waveline/packer.h"

#include <random>
#include <string>

#include "waveline/error.h"
#include "waveline/toy_isa.h"

namespace waveline::wave {

namespace {

void Emit(Bytes& image, std::string_view mnemonic,
          std::vector<std::string> operands) {
  InsnBytes insn = Encode(mnemonic, operands);
  image.insert(image.end(), insn.begin(), insn.end());
}

std::string Imm(uint32_t v) { return "#" + std::to_string(v); }

}  // namespace

PackResult PackLayers(const ToyProgram& program,
                      std::span<const uint8_t> keys) {
  if (keys.empty()) throw UsageError("pack needs at least one layer");
  Validate(program);
  PackResult result;
  ToyProgram current = program;
  for (uint8_t key : keys) {
    if (key == 0) throw UsageError("layer keys must be in 1..255");
    const uint32_t start = current.base;
    const uint32_t end = current.end();
    const uint32_t stub = end;
    if (stub + kStubInstructions * kInsnSize > kStackStart) {
      throw InputError("image overflow: packed image reaches the stack region");
    }
    const uint32_t loop = stub + 2 * kInsnSize;
    const uint32_t done = stub + 9 * kInsnSize;

    for (uint8_t& b : current.image) b ^= key;
    Bytes& img = current.image;
    Emit(img, "mov", {"r1", Imm(start)});
    Emit(img, "mov", {"r2", Imm(end)});
    Emit(img, "load", {"r3", "[r1]"});
    Emit(img, "xor", {"r3", Imm(key)});
    Emit(img, "store", {"[r1]", "r3"});
    Emit(img, "add", {"r1", "#1"});
    Emit(img, "cmp", {"r1", "r2"});
    Emit(img, "jz", {AddressToken(done)});
    Emit(img, "jmp", {AddressToken(loop)});
    Emit(img, "mov", {"r3", "#0"});
    Emit(img, "mov", {"r2", "#0"});
    Emit(img, "mov", {"r1", "#0"});
    Emit(img, "cmp", {"r1", "#1"});
    Emit(img, "jmp", {AddressToken(current.entry)});

    result.stubs.push_back(
        StubInfo{stub, kStubInstructions * kInsnSize, start, end, key});
    current.entry = stub;
  }
  result.program = std::move(current);
  return result;
}

ToyProgram Pack(const ToyProgram& program, std::span<const uint8_t> keys) {
  return PackLayers(program, keys).program;
}

std::vector<uint8_t> KeysFromSeed(uint64_t seed, int layers) {
  if (layers < 1) throw UsageError("pack needs at least one layer");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dist(1, 255);
  std::vector<uint8_t> keys;
  for (int i = 0; i < layers; ++i) keys.push_back(static_cast<uint8_t>(dist(rng)));
  return keys;
}

}  // namespace waveline::wave
