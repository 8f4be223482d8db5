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

#include <gtest/gtest.h>

#include "waveline/assembler.h"
#include "waveline/error.h"
#include "waveline/toy_gen.h"

namespace waveline::wave {
namespace {

InsnBytes Enc(std::string_view m, std::vector<std::string> ops) {
  return Encode(m, ops);
}

std::string Text(const Decoded& d) {
  std::string s(d.mnemonic);
  for (size_t i = 0; i < d.operands.size(); ++i) {
    s += (i == 0 ? " " : ", ") + d.operands[i];
  }
  return s;
}

TEST(Encode, FixedLayouts) {
  EXPECT_EQ(Enc("nop", {}), (InsnBytes{0x01, 0, 0, 0}));
  EXPECT_EQ(Enc("hlt", {}), (InsnBytes{0x02, 0, 0, 0}));
  EXPECT_EQ(Enc("mov", {"r1", "r2"}), (InsnBytes{0x10, 1, 2, 0}));
  EXPECT_EQ(Enc("add", {"r3", "#258"}), (InsnBytes{0x13, 3, 0x02, 0x01}));
  EXPECT_EQ(Enc("call", {"0x123456"}), (InsnBytes{0x23, 0x56, 0x34, 0x12}));
  EXPECT_EQ(Enc("jmp", {"r4"}), (InsnBytes{0x21, 4, 0, 0}));
  EXPECT_EQ(Enc("push", {"sp"}), (InsnBytes{0x30, 7, 0, 0}));
  EXPECT_EQ(Enc("load", {"r2", "[0x1a0]"}), (InsnBytes{0x42, 0xa0, 0x01, 0}));
  EXPECT_EQ(Enc("store", {"[0x1a0]", "r5"}), (InsnBytes{0x4d, 0xa0, 0x01, 0}));
  EXPECT_EQ(Enc("load", {"r1", "[r2]"}), (InsnBytes{0x50, 1, 2, 0}));
  EXPECT_EQ(Enc("store", {"[r1]", "r2"}), (InsnBytes{0x51, 1, 2, 0}));
}

TEST(Encode, RejectsBadOperands) {
  EXPECT_THROW(Enc("nop", {"r1"}), InputError);
  EXPECT_THROW(Enc("mov", {"r8", "r1"}), InputError);
  EXPECT_THROW(Enc("add", {"r1", "#70000"}), InputError);
  EXPECT_THROW(Enc("jz", {"r1"}), InputError);
  EXPECT_THROW(Enc("frob", {}), InputError);
}

TEST(Decode, RoundTripsEveryForm) {
  const std::vector<std::pair<std::string, std::vector<std::string>>> cases = {
      {"nop", {}}, {"hlt", {}}, {"ret", {}},
      {"mov", {"r0", "r7"}}, {"mov", {"r1", "#42"}},
      {"add", {"r2", "r3"}}, {"sub", {"r4", "#65535"}},
      {"xor", {"r5", "r6"}}, {"cmp", {"r1", "#0"}},
      {"jmp", {"0xf00"}}, {"jmp", {"r3"}}, {"jz", {"0x10"}},
      {"call", {"0x400"}}, {"call", {"r2"}}, {"push", {"r1"}}, {"pop", {"r6"}},
      {"load", {"r3", "[0x1a0]"}}, {"store", {"[0xe010]", "r0"}},
      {"load", {"r1", "[r2]"}}, {"store", {"[r4]", "r5"}}};
  for (const auto& [m, ops] : cases) {
    InsnBytes b = Encode(m, ops);
    auto d = Decode(b);
    ASSERT_TRUE(d.has_value()) << m;
    EXPECT_EQ(d->mnemonic, m);
    EXPECT_EQ(d->operands, ops) << m;
    EXPECT_EQ(Encode(d->mnemonic, d->operands), b);
  }
}

TEST(Decode, RejectsInvalidBytes) {
  EXPECT_FALSE(Decode(InsnBytes{0x00, 0, 0, 0}));
  EXPECT_FALSE(Decode(InsnBytes{0xff, 0, 0, 0}));
  EXPECT_FALSE(Decode(InsnBytes{0x01, 1, 0, 0}));
  EXPECT_FALSE(Decode(InsnBytes{0x10, 9, 0, 0}));
  EXPECT_FALSE(Decode(std::vector<uint8_t>{0x01, 0}));
}

TEST(Decode, FlowClasses) {
  EXPECT_EQ(Decode(Enc("call", {"0x10"}))->flow, Flow::kCall);
  EXPECT_EQ(Decode(Enc("call", {"r1"}))->flow, Flow::kIndirectCall);
  EXPECT_EQ(Decode(Enc("jz", {"0x10"}))->flow, Flow::kCondJump);
  EXPECT_EQ(Decode(Enc("ret", {}))->flow, Flow::kReturn);
  EXPECT_EQ(*Decode(Enc("store", {"[0x20]", "r1"}))->address, 0x20u);
}

TEST(WithAddress, ReplacesTarget) {
  InsnBytes b = WithAddress(Enc("jmp", {"0x10"}), 0x12345);
  EXPECT_EQ(Text(*Decode(b)), "jmp 0x12345");
}

TEST(Assemble, SingleHalt) {
  ToyProgram p = Assemble("hlt\n");
  EXPECT_EQ(p.base, 0u);
  EXPECT_EQ(p.entry, 0u);
  EXPECT_EQ(p.image, (Bytes{0x02, 0, 0, 0}));
}

TEST(Assemble, CallEncodesAbsoluteTarget) {
  ToyProgram p = Assemble(
      ".org 0x100\n"
      ".entry main\n"
      ".func f\n"
      "f: add r1, #1 ; comment\n"
      "   ret\n"
      "main:\n"
      "   call f\n"
      "   hlt\n");
  EXPECT_EQ(p.base, 0x100u);
  EXPECT_EQ(p.entry, 0x108u);
  EXPECT_EQ(p.function_table, std::vector<uint32_t>{0x100});
  auto call = Decode(std::span<const uint8_t>(p.image).subspan(8, 4));
  EXPECT_EQ(Text(*call), "call 0x100");
  // Fixed width: the return address is the call address plus 4.
  EXPECT_EQ(p.entry + kInsnSize, 0x10cu);
}

TEST(Assemble, LabelImmediatesAndData) {
  ToyProgram p = Assemble(
      "start: mov r1, #data\n"
      "  hlt\n"
      "data: .byte 1, 2, 3\n"
      "  .word 0x1234\n");
  EXPECT_EQ(Text(*Decode(std::span<const uint8_t>(p.image).subspan(0, 4))),
            "mov r1, #8");
  EXPECT_EQ(p.image.size(), 16u);
  EXPECT_EQ(p.image[8], 1);
  EXPECT_EQ(p.image[11], 0);
  EXPECT_EQ(p.image[12], 0x34);
  EXPECT_EQ(p.image[13], 0x12);
}

TEST(Assemble, ErrorsNameTheLine) {
  auto expect_error = [](const std::string& src, const std::string& needle) {
    try {
      Assemble(src);
      ADD_FAILURE() << "no error for: " << src;
    } catch (const InputError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  expect_error("a: nop\na: hlt\n", "line 2");
  expect_error("a: nop\na: hlt\n", "duplicate label");
  expect_error("nop\nfrob r1\n", "line 2");
  expect_error("jmp nowhere\n", "line 1");
  expect_error("nop\n.org 0x10\n", "line 2");
  expect_error(".org 0xeffc\nnop\nnop\n", "overflow");
}

TEST(ProgramJson, RoundTrip) {
  ToyProgram p = RandomToyProgram(5).program;
  EXPECT_EQ(ProgramFromJson(ProgramToJson(p)), p);
  EXPECT_THROW(ProgramFromJson(R"({"base":0,"entry":0,"image":"zz"})"), InputError);
  EXPECT_THROW(ProgramFromJson(R"({"base":0,"entry":8,"image":"02000000"})"),
               InputError);
}

TEST(ToyGen, ProgramsAreValidAndDeterministic) {
  for (uint64_t seed = 0; seed < 30; ++seed) {
    GeneratedProgram a = RandomToyProgram(seed), b = RandomToyProgram(seed);
    EXPECT_EQ(a.source, b.source);
    EXPECT_EQ(a.program, Assemble(a.source));
    EXPECT_GE(a.program.function_table.size(), 3u);
  }
}

TEST(Mnemonics, CoverTheIsa) {
  const std::vector<std::string>& m = Mnemonics();
  for (const char* name : {"nop", "hlt", "ret", "mov", "add", "sub", "xor",
                           "cmp", "jmp", "jz", "call", "push", "pop", "load",
                           "store"}) {
    EXPECT_NE(std::find(m.begin(), m.end(), name), m.end()) << name;
  }
}

}  // namespace
}  // namespace waveline::wave
