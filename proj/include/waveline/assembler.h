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

// Toy assembly and the ToyProgram container.
//
// Grammar, one statement per line, ';' starts a comment:
//
//   .org 0x400          load base, before any code (default 0, 4-aligned)
//   .entry main         entry label or address (default: the base)
//   .func helper        declare a function entry for ground-truth metrics
//   name:               label, may share a line with a statement
//   mov r1, #5          mnemonic and comma-separated operands
//   load r2, [table]    labels are accepted wherever an address is
//   .byte 1, 0x2f       data, padded with zeros to a 4-byte boundary
//   .word 0x1234        16-bit little-endian data, padded likewise
//
// Registers are r0..r7 (sp is an alias for r7). Immediates are "#n" with n
// decimal or 0x-hex, or "#label" for a label address that fits 16 bits.

#ifndef WAVELINE_ASSEMBLER_H_
#define WAVELINE_ASSEMBLER_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "waveline/bytes.h"

namespace waveline::wave {

struct ToyProgram {
  uint32_t base = 0;
  uint32_t entry = 0;
  Bytes image;
  // Declared function entries. Ground truth only, the unpacker never
  // reads it.
  std::vector<uint32_t> function_table;

  uint32_t end() const { return base + static_cast<uint32_t>(image.size()); }
  bool operator==(const ToyProgram&) const = default;
};

// Throws InputError on unknown mnemonics, bad operands, unresolved or
// duplicate labels and images reaching into the stack region.
ToyProgram Assemble(std::string_view source);

// Checks alignment, bounds and entry placement. Throws InputError.
void Validate(const ToyProgram& program);

std::string ProgramToJson(const ToyProgram& program);
ToyProgram ProgramFromJson(std::string_view text);

}  // namespace waveline::wave

#endif  // WAVELINE_ASSEMBLER_H_
