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

#include "waveline/toy_isa.h"

#include <charconv>
#include <cstdio>

#include "waveline/error.h"

namespace waveline::wave {

namespace {

enum Op : uint8_t {
  kNop = 0x01,
  kHlt = 0x02,
  kRet = 0x03,
  kMovRR = 0x10,
  kMovRI = 0x11,
  kAddRR = 0x12,
  kAddRI = 0x13,
  kSubRR = 0x14,
  kSubRI = 0x15,
  kXorRR = 0x16,
  kXorRI = 0x17,
  kCmpRR = 0x18,
  kCmpRI = 0x19,
  kJmpA = 0x20,
  kJmpR = 0x21,
  kJzA = 0x22,
  kCallA = 0x23,
  kCallR = 0x24,
  kPush = 0x30,
  kPop = 0x31,
  kLoadA = 0x40,   // + rd
  kStoreA = 0x48,  // + rs
  kLoadR = 0x50,
  kStoreR = 0x51,
};

std::string Reg(int r) { return "r" + std::to_string(r); }
std::string Imm(uint16_t v) { return "#" + std::to_string(v); }

uint32_t Addr24(std::span<const uint8_t> b) {
  return b[1] | (b[2] << 8) | (b[3] << 16);
}

struct AluForm {
  std::string_view mnemonic;
  uint8_t rr;
};

constexpr AluForm kAlu[] = {
    {"mov", kMovRR}, {"add", kAddRR}, {"sub", kSubRR},
    {"xor", kXorRR}, {"cmp", kCmpRR},
};

}  // namespace

std::string AddressToken(uint32_t address) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "0x%x", address);
  return buf;
}

std::optional<Decoded> Decode(std::span<const uint8_t> bytes) {
  if (bytes.size() < kInsnSize) return std::nullopt;
  Decoded d;
  d.opcode = bytes[0];
  const uint8_t b1 = bytes[1], b2 = bytes[2];
  const uint16_t imm = static_cast<uint16_t>(bytes[2] | (bytes[3] << 8));
  auto reg_ok = [](int r) { return r >= 0 && r < kRegisterCount; };

  switch (d.opcode) {
    case kNop:
    case kHlt:
    case kRet:
      if (b1 || b2 || bytes[3]) return std::nullopt;
      d.mnemonic = d.opcode == kNop ? "nop" : d.opcode == kHlt ? "hlt" : "ret";
      d.flow = d.opcode == kNop ? Flow::kNext
               : d.opcode == kHlt ? Flow::kHalt
                                  : Flow::kReturn;
      return d;
    case kJmpA:
    case kJzA:
    case kCallA:
      d.address = Addr24(bytes);
      d.mnemonic = d.opcode == kJmpA ? "jmp" : d.opcode == kJzA ? "jz" : "call";
      d.flow = d.opcode == kJmpA ? Flow::kJump
               : d.opcode == kJzA ? Flow::kCondJump
                                  : Flow::kCall;
      d.operands = {AddressToken(*d.address)};
      return d;
    case kJmpR:
    case kCallR:
    case kPush:
    case kPop:
      if (!reg_ok(b1) || b2 || bytes[3]) return std::nullopt;
      d.rs = d.rd = b1;
      d.mnemonic = d.opcode == kJmpR    ? "jmp"
                   : d.opcode == kCallR ? "call"
                   : d.opcode == kPush  ? "push"
                                        : "pop";
      d.flow = d.opcode == kJmpR    ? Flow::kIndirectJump
               : d.opcode == kCallR ? Flow::kIndirectCall
                                    : Flow::kNext;
      d.operands = {Reg(b1)};
      return d;
    case kLoadR:
    case kStoreR:
      if (!reg_ok(b1) || !reg_ok(b2) || bytes[3]) return std::nullopt;
      d.rd = b1;
      d.rs = b2;
      if (d.opcode == kLoadR) {
        d.mnemonic = "load";
        d.operands = {Reg(b1), "[" + Reg(b2) + "]"};
      } else {
        d.mnemonic = "store";
        d.operands = {"[" + Reg(b1) + "]", Reg(b2)};
      }
      return d;
    default:
      break;
  }
  if (d.opcode >= kLoadA && d.opcode < kLoadA + 8) {
    d.rd = d.opcode - kLoadA;
    d.address = Addr24(bytes);
    d.mnemonic = "load";
    d.operands = {Reg(d.rd), "[" + AddressToken(*d.address) + "]"};
    return d;
  }
  if (d.opcode >= kStoreA && d.opcode < kStoreA + 8) {
    d.rs = d.opcode - kStoreA;
    d.address = Addr24(bytes);
    d.mnemonic = "store";
    d.operands = {"[" + AddressToken(*d.address) + "]", Reg(d.rs)};
    return d;
  }
  for (const AluForm& alu : kAlu) {
    if (d.opcode == alu.rr) {
      if (!reg_ok(b1) || !reg_ok(b2) || bytes[3]) return std::nullopt;
      d.mnemonic = alu.mnemonic;
      d.rd = b1;
      d.rs = b2;
      d.operands = {Reg(b1), Reg(b2)};
      return d;
    }
    if (d.opcode == alu.rr + 1) {
      if (!reg_ok(b1)) return std::nullopt;
      d.mnemonic = alu.mnemonic;
      d.rd = b1;
      d.imm = imm;
      d.operands = {Reg(b1), Imm(imm)};
      return d;
    }
  }
  return std::nullopt;
}

namespace {

[[noreturn]] void BadOperands(std::string_view mnemonic,
                              std::span<const std::string> operands) {
  std::string msg = "invalid operands for '" + std::string(mnemonic) + "':";
  for (const auto& op : operands) msg += " " + op;
  throw InputError(msg);
}

std::optional<int> ParseReg(std::string_view tok) {
  if (tok == "sp") return kStackPointer;
  if (tok.size() != 2 || tok[0] != 'r' || tok[1] < '0' ||
      tok[1] >= '0' + kRegisterCount) {
    return std::nullopt;
  }
  return tok[1] - '0';
}

std::optional<uint64_t> ParseNumber(std::string_view tok) {
  int base = 10;
  if (tok.size() > 2 && tok[0] == '0' && (tok[1] == 'x' || tok[1] == 'X')) {
    tok.remove_prefix(2);
    base = 16;
  }
  if (tok.empty()) return std::nullopt;
  uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v, base);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) return std::nullopt;
  return v;
}

std::optional<uint16_t> ParseImm(std::string_view tok) {
  if (tok.empty() || tok[0] != '#') return std::nullopt;
  auto v = ParseNumber(tok.substr(1));
  if (!v || *v > 0xFFFF) return std::nullopt;
  return static_cast<uint16_t>(*v);
}

std::optional<uint32_t> ParseAddr(std::string_view tok) {
  auto v = ParseNumber(tok);
  if (!v || *v > kAddressMask) return std::nullopt;
  return static_cast<uint32_t>(*v);
}

// "[...]" -> inner text.
std::optional<std::string_view> Memory(std::string_view tok) {
  if (tok.size() < 3 || tok.front() != '[' || tok.back() != ']') {
    return std::nullopt;
  }
  return tok.substr(1, tok.size() - 2);
}

InsnBytes Pack(uint8_t op, uint8_t b1, uint8_t b2, uint8_t b3) {
  return {op, b1, b2, b3};
}

InsnBytes PackAddr(uint8_t op, uint32_t addr) {
  return {op, static_cast<uint8_t>(addr), static_cast<uint8_t>(addr >> 8),
          static_cast<uint8_t>(addr >> 16)};
}

}  // namespace

InsnBytes Encode(std::string_view m, std::span<const std::string> ops) {
  const size_t n = ops.size();
  if (m == "nop" || m == "hlt" || m == "ret") {
    if (n != 0) BadOperands(m, ops);
    return Pack(m == "nop" ? kNop : m == "hlt" ? kHlt : kRet, 0, 0, 0);
  }
  for (const AluForm& alu : kAlu) {
    if (m != alu.mnemonic) continue;
    if (n != 2) BadOperands(m, ops);
    auto rd = ParseReg(ops[0]);
    if (!rd) BadOperands(m, ops);
    if (auto rs = ParseReg(ops[1])) {
      return Pack(alu.rr, static_cast<uint8_t>(*rd), static_cast<uint8_t>(*rs),
                  0);
    }
    if (auto imm = ParseImm(ops[1])) {
      return Pack(alu.rr + 1, static_cast<uint8_t>(*rd),
                  static_cast<uint8_t>(*imm), static_cast<uint8_t>(*imm >> 8));
    }
    BadOperands(m, ops);
  }
  if (m == "jmp" || m == "jz" || m == "call") {
    if (n != 1) BadOperands(m, ops);
    if (auto r = ParseReg(ops[0])) {
      if (m == "jz") BadOperands(m, ops);
      return Pack(m == "jmp" ? kJmpR : kCallR, static_cast<uint8_t>(*r), 0, 0);
    }
    auto a = ParseAddr(ops[0]);
    if (!a) BadOperands(m, ops);
    return PackAddr(m == "jmp" ? kJmpA : m == "jz" ? kJzA : kCallA, *a);
  }
  if (m == "push" || m == "pop") {
    if (n != 1) BadOperands(m, ops);
    auto r = ParseReg(ops[0]);
    if (!r) BadOperands(m, ops);
    return Pack(m == "push" ? kPush : kPop, static_cast<uint8_t>(*r), 0, 0);
  }
  if (m == "load") {
    if (n != 2) BadOperands(m, ops);
    auto rd = ParseReg(ops[0]);
    auto mem = Memory(ops[1]);
    if (!rd || !mem) BadOperands(m, ops);
    if (auto rs = ParseReg(*mem)) {
      return Pack(kLoadR, static_cast<uint8_t>(*rd), static_cast<uint8_t>(*rs),
                  0);
    }
    auto a = ParseAddr(*mem);
    if (!a) BadOperands(m, ops);
    return PackAddr(static_cast<uint8_t>(kLoadA + *rd), *a);
  }
  if (m == "store") {
    if (n != 2) BadOperands(m, ops);
    auto mem = Memory(ops[0]);
    auto rs = ParseReg(ops[1]);
    if (!rs || !mem) BadOperands(m, ops);
    if (auto rd = ParseReg(*mem)) {
      return Pack(kStoreR, static_cast<uint8_t>(*rd), static_cast<uint8_t>(*rs),
                  0);
    }
    auto a = ParseAddr(*mem);
    if (!a) BadOperands(m, ops);
    return PackAddr(static_cast<uint8_t>(kStoreA + *rs), *a);
  }
  throw InputError("unknown mnemonic '" + std::string(m) + "'");
}

InsnBytes WithAddress(const InsnBytes& insn, uint32_t address) {
  InsnBytes out = insn;
  out[1] = static_cast<uint8_t>(address);
  out[2] = static_cast<uint8_t>(address >> 8);
  out[3] = static_cast<uint8_t>(address >> 16);
  return out;
}

const std::vector<std::string>& Mnemonics() {
  static const std::vector<std::string> kMnemonics = {
      "add",  "call", "cmp", "hlt", "jmp",   "jz",  "load", "mov",
      "nop",  "pop",  "push", "ret", "store", "sub", "xor"};
  return kMnemonics;
}

corpus::Instruction ToCorpusInstruction(const Decoded& d, uint64_t address) {
  return corpus::Instruction{std::string(d.mnemonic), d.operands, address,
                             kInsnSize};
}

}  // namespace waveline::wave
