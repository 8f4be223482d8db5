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


#include <gtest/gtest.h>

#include <filesystem>

#include "support/fixtures.h"
#include "waveline/assembler.h"
#include "waveline/error.h"
#include "waveline/hashing.h"
#include "waveline/loader.h"
#include "waveline/metrics.h"
#include "waveline/packer.h"
#include "waveline/reconstruct.h"
#include "waveline/toy_gen.h"
#include "waveline/vm.h"
#include "waveline/wave_io.h"

namespace waveline::wave {
namespace {

constexpr char kThreeFunctions[] = R"(.org 0x400
.entry main
.func f
.func g
.func h
main:
  call f
  call g
  call h
  hlt
f:
  add r1, #3
  sub r2, r1
  xor r3, #7
  ret
g:
  mov r4, #9
  store [0xe000], r4
  load r5, [0xe000]
  ret
h:
  push r1
  pop r2
  cmp r2, #4
  jz h_out
  add r6, #1
h_out:
  ret
)";

Bytes Slice(const Bytes& mem, uint32_t lo, uint32_t hi) {
  return Bytes(mem.begin() + lo, mem.begin() + hi);
}

metrics::FunctionSetPair SppSets(const corpus::SampleCorpus& original,
                                 const corpus::SampleCorpus& unpacked) {
  std::vector<corpus::SampleCorpus> both = {original, unpacked};
  hashing::PrimeTable t = hashing::PrimeTable::Build(corpus::CollectMnemonics(both));
  return {metrics::SppFunctionSet(original, t, {}),
          metrics::SppFunctionSet(unpacked, t, {})};
}

std::vector<uint8_t> Keys(std::initializer_list<uint8_t> k) { return k; }

TEST(Pack, RejectsZeroLayersAndZeroKeys) {
  ToyProgram p = Assemble(kThreeFunctions);
  EXPECT_THROW(Pack(p, {}), UsageError);
  EXPECT_THROW(Pack(p, Keys({0})), UsageError);
  EXPECT_THROW(KeysFromSeed(1, 0), UsageError);
}

TEST(Pack, StubsAreAppendedAndBecomeEntry) {
  ToyProgram p = Assemble(kThreeFunctions);
  PackResult r = PackLayers(p, Keys({0x21, 0x42}));
  ASSERT_EQ(r.stubs.size(), 2u);
  EXPECT_EQ(r.stubs[0].entry, p.end());
  EXPECT_EQ(r.stubs[0].size, kStubInstructions * kInsnSize);
  EXPECT_EQ(r.stubs[0].body_start, p.base);
  EXPECT_EQ(r.stubs[0].body_end, p.end());
  EXPECT_EQ(r.stubs[1].body_end, r.stubs[0].entry + r.stubs[0].size);
  EXPECT_EQ(r.program.entry, r.stubs[1].entry);
  EXPECT_EQ(r.program.base, p.base);
  // Body bytes are XORed with both keys.
  for (size_t i = 0; i < p.image.size(); ++i) {
    EXPECT_EQ(r.program.image[i], p.image[i] ^ 0x21 ^ 0x42);
  }
  EXPECT_EQ(Pack(p, Keys({0x21, 0x42})), r.program);
}

TEST(Pack, DecryptedStubsDisassemble) {
  ToyProgram p = Assemble(kThreeFunctions);
  PackResult r = PackLayers(p, Keys({5, 6, 7}));
  auto stubs = testing::DecryptedStubs(r);
  ASSERT_EQ(stubs.size(), 3u);
  for (const auto& s : stubs) EXPECT_EQ(s.size(), kStubInstructions);
}

TEST(Pack, ImageOverflowIsAnInputError) {
  std::string src = ".org 0xef00\n";
  for (int i = 0; i < 60; ++i) src += "nop\n";
  ToyProgram p = Assemble(src);
  EXPECT_THROW(Pack(p, Keys({1})), InputError);
}

TEST(Vm, UnpackedProgramHasOneWave) {
  ToyProgram p = Assemble(kThreeFunctions);
  RunResult r = RunAndUnpack(p);
  ASSERT_EQ(r.waves.size(), 1u);
  EXPECT_TRUE(r.final_state.halted);
  ASSERT_EQ(r.waves[0].statefile.size(), 1u);
  EXPECT_EQ(r.waves[0].statefile[0].addr, p.base);
  EXPECT_EQ(r.waves[0].statefile[0].bytes, p.image);
  EXPECT_EQ(r.waves[0].instruction_log.front().addr, p.entry);
  int calls = 0;
  for (const LoggedInsn& l : r.waves[0].instruction_log) calls += l.call_target;
  EXPECT_EQ(calls, 3);
}

TEST(Vm, OneLayerGivesTwoWavesWithOriginalBody) {
  ToyProgram p = Assemble(kThreeFunctions);
  RunResult r = RunAndUnpack(Pack(p, Keys({0x5a})));
  ASSERT_EQ(r.waves.size(), 2u);
  ASSERT_EQ(r.waves[1].statefile.size(), 1u);
  EXPECT_EQ(r.waves[1].statefile[0].addr, p.base);
  EXPECT_EQ(r.waves[1].statefile[0].bytes, p.image);
  EXPECT_EQ(r.waves[1].instruction_log.front().addr, p.entry);
}

TEST(Vm, ThreeLayersGiveFourWaves) {
  ToyProgram p = Assemble(kThreeFunctions);
  EXPECT_EQ(RunAndUnpack(Pack(p, Keys({1, 2, 3}))).waves.size(), 4u);
}

TEST(Vm, OverlayReproducesWaveImages) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    ToyProgram p = RandomToyProgram(seed).program;
    RunOptions opts;
    opts.record_wave_images = true;
    RunResult r = RunAndUnpack(Pack(p, KeysFromSeed(seed, 3)), opts);
    ASSERT_EQ(r.waves.size(), 4u);
    ASSERT_EQ(r.wave_images.size(), 4u);
    for (size_t w = 0; w < r.waves.size(); ++w) {
      EXPECT_EQ(OverlayStatefiles(r.waves, w), r.wave_images[w]) << seed << "/" << w;
    }
  }
}

TEST(Vm, DifferentKeysSameHaltState) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    ToyProgram p = RandomToyProgram(seed).program;
    ToyProgram a = Pack(p, Keys({0x11, 0x22}));
    ToyProgram b = Pack(p, Keys({0x91, 0x07}));
    EXPECT_NE(a.image, b.image);
    RunResult ra = RunAndUnpack(a), rb = RunAndUnpack(b);
    RunResult plain = RunAndUnpack(p);
    EXPECT_EQ(ra.final_state.regs, rb.final_state.regs);
    EXPECT_EQ(ra.final_state.regs, plain.final_state.regs);
    EXPECT_EQ(ra.final_state.zero, rb.final_state.zero);
    EXPECT_TRUE(ra.final_state.halted && rb.final_state.halted);
    EXPECT_EQ(Slice(ra.final_state.memory, p.base, p.end()), p.image);
    EXPECT_EQ(Slice(rb.final_state.memory, p.base, p.end()), p.image);
    EXPECT_EQ(Slice(ra.final_state.memory, kScratchBase, kScratchBase + 0x100),
              Slice(plain.final_state.memory, kScratchBase, kScratchBase + 0x100));
  }
}

TEST(Vm, StepBudgetCarriesPartialRun) {
  ToyProgram p = Assemble("loop: jmp loop\n");
  RunOptions opts;
  opts.max_steps = 100;
  try {
    RunAndUnpack(p, opts);
    FAIL();
  } catch (const VmError& e) {
    EXPECT_EQ(e.partial().waves.size(), 1u);
    EXPECT_EQ(e.partial().final_state.steps, 100u);
  }
}

TEST(Vm, InvalidOpcodeReportsAddress) {
  ToyProgram p = Assemble("nop\njmp bad\nbad: .byte 0xff\n");
  try {
    RunAndUnpack(p);
    FAIL();
  } catch (const VmError& e) {
    EXPECT_EQ(e.fault_address(), 8u);
    EXPECT_EQ(e.kind(), ErrorKind::kInput);
  }
}

WaveArtifacts Wave(int index, std::vector<StateRun> runs) {
  WaveArtifacts w;
  w.wave_index = index;
  w.statefile = std::move(runs);
  return w;
}

TEST(Loader, IdenticalRangeLoadedOnce) {
  const Bytes image(64, 0x01);
  const Bytes body = {0x13, 1, 1, 0, 0x03, 0, 0, 0};
  std::vector<WaveArtifacts> waves = {Wave(0, {{0x100, image}}),
                                      Wave(1, {{0x120, body}}),
                                      Wave(2, {{0x120, body}}),
                                      Wave(3, {{0x120, body}})};
  MergedDatabase db = LoadRanges(waves, RangeFilter::kExecOnly);
  ASSERT_EQ(db.segments.size(), 2u);
  EXPECT_EQ(db.loaded.size(), 2u);
  EXPECT_EQ(db.Translate(3, 0x120), db.segments[1].virtual_start());
}

TEST(Loader, DifferentContentIsRelocatedWithGap) {
  const Bytes image(64, 0x01);
  // jmp 0x124 then ret: the jump targets its own range.
  const Bytes first = {0x20, 0x24, 0x01, 0, 0x03, 0, 0, 0};
  const Bytes second = {0x20, 0x24, 0x01, 0, 0x02, 0, 0, 0};
  std::vector<WaveArtifacts> waves = {Wave(0, {{0x100, image}}),
                                      Wave(1, {{0x120, first}}),
                                      Wave(2, {{0x120, second}})};
  MergedDatabase db = LoadRanges(waves, RangeFilter::kExecOnly);
  ASSERT_EQ(db.segments.size(), 3u);
  // Both runs overlap the image, so each lands past the previous end.
  EXPECT_EQ(db.segments[1].linear_start, 0x140u + kRelocationGap);
  const Segment& moved = db.segments[2];
  EXPECT_TRUE(moved.relocated);
  EXPECT_EQ(moved.linear_start, 0x158u + kRelocationGap);
  EXPECT_EQ(moved.base, 0u);
  EXPECT_EQ(moved.virtual_start(), moved.linear_start);
  EXPECT_EQ(moved.content_md5, Md5Hex(second));
  auto jmp = Decode(std::span<const uint8_t>(moved.bytes).subspan(0, 4));
  EXPECT_EQ(*jmp->address, moved.virtual_start() + 4);
  EXPECT_EQ(db.Translate(0, 0x124), 0x124u);
  EXPECT_EQ(db.Translate(1, 0x124), 0x154u);
  EXPECT_EQ(db.Translate(2, 0x124), moved.virtual_start() + 4);
  EXPECT_EQ(db.OriginalAddress(moved.virtual_start() + 4), 0x124u);
}

TEST(Loader, ExecOnlyDropsDataRuns) {
  const Bytes image(32, 0x01);
  std::vector<WaveArtifacts> waves = {
      Wave(0, {{0x100, image}}),
      Wave(1, {{0xe000, Bytes(8, 7)}, {0x118, Bytes(16, 9)}})};
  MergedDatabase exec = LoadRanges(waves, RangeFilter::kExecOnly);
  for (const Segment& s : exec.segments) {
    EXPECT_FALSE(s.orig_start >= 0xe000u);
  }
  ASSERT_EQ(exec.segments.size(), 2u);
  EXPECT_EQ(exec.segments[1].length(), 8u);  // clipped to the image end
  MergedDatabase all = LoadRanges(waves, RangeFilter::kAll);
  EXPECT_EQ(all.segments.size(), 3u);
  EXPECT_EQ(ParseRangeFilter(RangeFilterName(RangeFilter::kAll)), RangeFilter::kAll);
  EXPECT_FALSE(ParseRangeFilter("rwx"));
}

TEST(Loader, ReloadingIsIdempotent) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    ToyProgram p = RandomToyProgram(seed).program;
    RunResult r = RunAndUnpack(Pack(p, KeysFromSeed(seed, 2)));
    MergedDatabase once = LoadRanges(r.waves, RangeFilter::kExecOnly);
    std::vector<WaveArtifacts> doubled = r.waves;
    WaveArtifacts again = r.waves.back();
    again.wave_index = static_cast<int>(doubled.size());
    doubled.push_back(again);
    MergedDatabase twice = LoadRanges(doubled, RangeFilter::kExecOnly);
    EXPECT_EQ(once.segments, twice.segments);
    EXPECT_EQ(once.loaded, twice.loaded);
  }
}

TEST(Loader, RelocationPreservesBranchTargets) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    ToyProgram p = RandomToyProgram(seed).program;
    RunResult r = RunAndUnpack(Pack(p, KeysFromSeed(seed, 3)));
    MergedDatabase db = LoadRanges(r.waves, RangeFilter::kExecOnly);
    for (const Segment& s : db.segments) {
      if (!s.relocated) continue;
      const uint32_t orig_end = s.orig_start + s.length();
      const Bytes before = OverlayStatefiles(r.waves, static_cast<size_t>(s.wave));
      for (uint32_t off = 0; off + 4 <= s.length(); off += 4) {
        auto orig = Decode(std::span<const uint8_t>(before).subspan(s.orig_start + off, 4));
        auto now = Decode(std::span<const uint8_t>(s.bytes).subspan(off, 4));
        if (!orig || !orig->address) continue;
        ASSERT_TRUE(now && now->address);
        if (*orig->address >= s.orig_start && *orig->address < orig_end) {
          EXPECT_EQ(*now->address, s.virtual_start() + (*orig->address - s.orig_start));
          EXPECT_EQ(db.OriginalAddress(*now->address), *orig->address);
        } else {
          EXPECT_EQ(*now->address, *orig->address);
        }
      }
    }
  }
}

TEST(Reconstruct, OneLayerRecoversEveryFunction) {
  ToyProgram p = Assemble(kThreeFunctions);
  RunResult r = RunAndUnpack(Pack(p, Keys({0x3c})));
  MergedDatabase db = LoadRanges(r.waves, RangeFilter::kExecOnly);
  ReconstructResult rec = Reconstruct(db, r.waves, "packed");
  corpus::Validate(rec.corpus);
  corpus::SampleCorpus original = ProgramCorpus(p, "plain");
  EXPECT_EQ(original.functions.size(), 4u);
  EXPECT_GE(rec.corpus.functions.size(), 4u);
  metrics::FunctionSetPair sets = SppSets(original, rec.corpus);
  EXPECT_EQ(metrics::FunctionCoverage(sets).value(), 1.0);
  // One stub function on top of the four originals.
  EXPECT_EQ(metrics::FunctionNoiseRatio(sets), (metrics::Ratio{1, 5}));
  EXPECT_GT(rec.disassembled, 0u);
}

TEST(Reconstruct, UncalledIndirectTargetIsMissed) {
  ToyProgram p = Assemble(R"(.org 0x200
.entry main
.func f
.func g
main:
  call g
  mov r2, #f
  cmp r2, #0
  jz never
  hlt
never:
  call r2
  hlt
g:
  mov r4, #1
  add r4, r4
  add r4, #2
  ret
f:
  add r1, #1
  sub r1, #2
  xor r1, r3
  ret
)");
  RunResult r = RunAndUnpack(p);
  ASSERT_EQ(r.waves.size(), 1u);
  MergedDatabase db = LoadRanges(r.waves, RangeFilter::kExecOnly);
  ReconstructResult rec = Reconstruct(db, r.waves, "plain");
  metrics::FunctionSetPair sets = SppSets(ProgramCorpus(p, "truth"), rec.corpus);
  EXPECT_EQ(metrics::FunctionCoverage(sets), (metrics::Ratio{2, 3}));
  EXPECT_EQ(metrics::FunctionNoiseRatio(sets).value(), 0.0);
}

TEST(Reconstruct, InvalidOpcodeIsADiagnostic) {
  ToyProgram p = Assemble(R"(.entry main
main:
  cmp r1, #1
  jz broken
  add r2, #1
  add r3, #2
  hlt
broken:
  .byte 0xff
)");
  RunResult r = RunAndUnpack(p);
  MergedDatabase db = LoadRanges(r.waves, RangeFilter::kExecOnly);
  ReconstructResult rec = Reconstruct(db, r.waves, "x");
  EXPECT_EQ(rec.corpus.functions.size(), 1u);
  ASSERT_FALSE(rec.diagnostics.empty());
  EXPECT_NE(rec.diagnostics[0].find("invalid"), std::string::npos) << rec.diagnostics[0];
}

TEST(WaveIo, RunRoundTrip) {
  ToyProgram p = RandomToyProgram(3).program;
  ToyProgram packed = Pack(p, Keys({9, 8}));
  RunResult r = RunAndUnpack(packed);
  const auto dir = std::filesystem::temp_directory_path() /
                   ("waveline_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
  std::filesystem::remove_all(dir);
  WriteRun(dir, r, packed.entry);
  RunRecord back = ReadRun(dir);
  EXPECT_EQ(back.pid, r.pid);
  EXPECT_EQ(back.entry, packed.entry);
  EXPECT_EQ(back.waves, r.waves);
  EXPECT_TRUE(std::filesystem::exists(dir / "wave-001.state.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "wave-002.log.json"));
  std::filesystem::remove_all(dir);
  EXPECT_THROW(ReadRun(dir), InputError);
}

}  // namespace
}  // namespace waveline::wave
