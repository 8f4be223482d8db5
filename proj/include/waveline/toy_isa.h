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

// The toy instruction set run by the wave engine.
//
// Every instruction is four bytes: an opcode byte followed by three operand
// bytes. Absolute code and data addresses are 24-bit little-endian fields;
// the VM itself addresses 64 KiB, the wider field leaves room for relocated
// segments in the merged database. Registers r0..r7 are 16 bits; r7 is the
// stack pointer. add/sub/xor/cmp set the zero flag.
//
//   opcode        form                 operand bytes
//   01 nop / 02 hlt / 03 ret           -
//   10 12 14 16 18  mov/add/sub/xor/cmp rd, rs     rd, rs
//   11 13 15 17 19  mov/add/sub/xor/cmp rd, #imm   rd, imm16
//   20 jmp addr   21 jmp rs   22 jz addr   23 call addr   24 call rs
//   30 push rs    31 pop rd
//   40+rd load rd, [addr]     48+rs store [addr], rs     (byte access)
//   50 load rd, [rs]          51 store [rd], rs           rd, rs
//
// Operand tokens use one canonical spelling everywhere: "r3", "#42",
// "0x1a0", "[0x1a0]", "[r2]".

#ifndef WAVELINE_TOY_ISA_H_
#define WAVELINE_TOY_ISA_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "waveline/corpus.h"

namespace waveline::wave {

inline constexpr uint32_t kInsnSize = 4;
inline constexpr uint32_t kMemorySize = 0x10000;
inline constexpr uint32_t kStackStart = 0xF000;  // stack region [F000, 10000)
inline constexpr uint32_t kAddressMask = 0xFFFFFF;
inline constexpr int kRegisterCount = 8;
inline constexpr int kStackPointer = 7;

using InsnBytes = std::array<uint8_t, kInsnSize>;

enum class Flow {
  kNext,
  kJump,
  kCondJump,
  kCall,
  kReturn,
  kHalt,
  kIndirectJump,
  kIndirectCall,
};

struct Decoded {
  uint8_t opcode = 0;
  std::string_view mnemonic;
  Flow flow = Flow::kNext;
  int rd = 0;
  int rs = 0;
  uint16_t imm = 0;
  // Set for the forms carrying an absolute 24-bit address.
  std::optional<uint32_t> address;
  std::vector<std::string> operands;
};

std::optional<Decoded> Decode(std::span<const uint8_t> bytes);

// Encodes one instruction from canonical operand tokens. Throws InputError
// for unknown mnemonics or operand shapes the mnemonic does not accept.
InsnBytes Encode(std::string_view mnemonic,
                 std::span<const std::string> operands);

// Copy of `insn` with its absolute address field replaced. Only valid when
// Decode(insn)->address is set.
InsnBytes WithAddress(const InsnBytes& insn, uint32_t address);

// The fifteen mnemonics of the ISA, sorted.
const std::vector<std::string>& Mnemonics();

corpus::Instruction ToCorpusInstruction(const Decoded& d, uint64_t address);

std::string AddressToken(uint32_t address);  // "0x1a0"

}  // namespace waveline::wave

#endif  // WAVELINE_TOY_ISA_H_
