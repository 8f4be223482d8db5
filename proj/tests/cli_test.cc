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


#include "waveline/cli.h"

#include <gtest/gtest.h>
#include <unistd.h>

#include <filesystem>
#include <sstream>

#include "support/fixtures.h"
#include "waveline/bytes.h"
#include "waveline/corpus.h"

namespace waveline::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome Cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  Outcome o;
  o.code = RunCli(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("waveline_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string P(const std::string& name) const { return (dir_ / name).string(); }

  std::string WriteCorpus(const std::string& name) const {
    std::vector<corpus::SampleCorpus> samples;
    const std::vector<std::vector<int>> sets = {
        {1, 2, 3, 4, 5}, {1, 2, 3, 4, 5, 6, 7}, {1, 2, 3, 4, 5, 6, 7, 8, 9}};
    for (size_t v = 0; v < sets.size(); ++v) {
      for (int j = 0; j < 2; ++j) {
        samples.push_back(testing::FixtureSample(
            sets[v], "s" + std::to_string(v) + "_" + std::to_string(j), j));
      }
    }
    WriteFile(P(name), corpus::SerializeCorpus(samples));
    return P(name);
  }

  fs::path dir_;
};

TEST_F(CliTest, Version) {
  Outcome o = Cli({"--version"});
  EXPECT_EQ(o.code, 0);
  EXPECT_EQ(o.out, "waveline 0.1.0 (corpus format 1, graph format 1, wave format 1)\n");
}

TEST_F(CliTest, LineageWritesDotAndJson) {
  const std::string in = WriteCorpus("c.jsonl");
  Outcome o = Cli({"lineage", "--in", in, "--hash", "spp", "--dot", P("g.dot"),
                   "--json", P("g.json")});
  EXPECT_EQ(o.code, 0) << o.err;
  const std::string dot = ReadFile(P("g.dot"));
  EXPECT_NE(dot.find("digraph"), std::string::npos);
  EXPECT_NE(dot.find("label=\"5,2\""), std::string::npos) << dot;
  EXPECT_NE(ReadFile(P("g.json")).find("\"nodes\""), std::string::npos);
}

TEST_F(CliTest, LineageDefaultsToDotOnStdout) {
  const std::string in = WriteCorpus("c.jsonl");
  Outcome o = Cli({"lineage", "--in", in});
  EXPECT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.out.rfind("digraph lineage {", 0), 0u);
  Outcome raw = Cli({"lineage", "--in", in, "--hash", "raw"});
  EXPECT_EQ(raw.code, 0);
  EXPECT_NE(raw.out, o.out);
}

TEST_F(CliTest, MissingInputIsExitTwoWithPath) {
  Outcome o = Cli({"lineage", "--in", P("nope.jsonl")});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("nope.jsonl"), std::string::npos) << o.err;
}

TEST_F(CliTest, UsageErrorsAreExitOne) {
  EXPECT_EQ(Cli({"synth", "--model", "dag", "--versions", "3", "--out",
                 P("x.jsonl")}).code,
            1);
  EXPECT_EQ(Cli({"lineage"}).code, 1);
  EXPECT_EQ(Cli({"frobnicate"}).code, 1);
  EXPECT_EQ(Cli({"lineage", "--in", WriteCorpus("c.jsonl"), "--hash", "sha"}).code, 1);
}

TEST_F(CliTest, MalformedCorpusIsExitTwo) {
  WriteFile(P("bad.jsonl"), "{\"sample_id\": 3}\n");
  Outcome o = Cli({"lineage", "--in", P("bad.jsonl")});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("line 1"), std::string::npos) << o.err;
}

TEST_F(CliTest, HashDumpAndPrimeTable) {
  const std::string in = WriteCorpus("c.jsonl");
  ASSERT_EQ(Cli({"hash", "--in", in, "--out", P("h.csv"), "--prime-table-out",
                 P("t.json")}).code,
            0);
  const std::string csv = ReadFile(P("h.csv"));
  EXPECT_EQ(csv.rfind("sample_id,program_hash_raw,program_hash_spp,n_functions\n", 0), 0u);
  Outcome again = Cli({"hash", "--in", in, "--prime-table", P("t.json")});
  EXPECT_EQ(again.code, 0);
  EXPECT_EQ(again.out, csv);
}

TEST_F(CliTest, SynthThenMetricsPo) {
  ASSERT_EQ(Cli({"synth", "--model", "straight", "--versions", "6", "--variants",
                 "3", "--seed", "4", "--out", P("s.jsonl"), "--truth",
                 P("truth.json")}).code,
            0);
  ASSERT_EQ(Cli({"lineage", "--in", P("s.jsonl"), "--json", P("inf.json")}).code, 0);
  Outcome po = Cli({"metrics", "po", "--truth", P("truth.json"), "--inferred",
                    P("inf.json")});
  EXPECT_EQ(po.code, 0) << po.err;
  EXPECT_EQ(po.out, "1.000000\n");
  Outcome prec = Cli({"metrics", "po", "--truth", P("truth.json"), "--inferred",
                      P("inf.json"), "--precision"});
  EXPECT_EQ(prec.out, "1.000000\n");
}

TEST_F(CliTest, WavePipelineAndFcFnr) {
  WriteFile(P("p.s"),
            ".org 0x400\n.entry main\n.func f\n.func g\n"
            "main:\n  call f\n  call g\n  hlt\n"
            "f:\n  add r1, #1\n  sub r2, r1\n  xor r3, r2\n  ret\n"
            "g:\n  mov r4, #2\n  store [0xe000], r4\n  load r5, [0xe000]\n  ret\n");
  ASSERT_EQ(Cli({"wave", "assemble", "--in", P("p.s"), "--out", P("p.json")}).code, 0);
  ASSERT_EQ(Cli({"wave", "pack", "--in", P("p.json"), "--keys", "17,99", "--out",
                 P("packed.json")}).code,
            0);
  ASSERT_EQ(Cli({"wave", "run", "--in", P("packed.json"), "--out", P("run")}).code, 0);
  EXPECT_TRUE(fs::exists(P("run/wave-002.state.json")));
  EXPECT_FALSE(fs::exists(P("run/wave-003.state.json")));
  ASSERT_EQ(Cli({"wave", "load", "--run", P("run"), "--out", P("db.json")}).code, 0);
  ASSERT_EQ(Cli({"wave", "reconstruct", "--run", P("run"), "--sample-id", "x",
                 "--out", P("u.jsonl")}).code,
            0);
  ASSERT_EQ(Cli({"wave", "corpus", "--in", P("p.json"), "--sample-id", "x",
                 "--out", P("o.jsonl")}).code,
            0);
  Outcome fc = Cli({"metrics", "fc-fnr", "--original", P("o.jsonl"), "--unpacked",
                    P("u.jsonl")});
  EXPECT_EQ(fc.code, 0) << fc.err;
  // Both stubs share one mnemonic multiset: 3 originals + 1 stub hash.
  EXPECT_EQ(fc.out, "sample_id,fc,fnr\nx,1.000000,0.250000\n");
}

TEST_F(CliTest, PackNeedsLayersOrKeys) {
  WriteFile(P("p.s"), "hlt\n");
  ASSERT_EQ(Cli({"wave", "assemble", "--in", P("p.s"), "--out", P("p.json")}).code, 0);
  EXPECT_EQ(Cli({"wave", "pack", "--in", P("p.json"), "--layers", "0"}).code, 1);
  EXPECT_EQ(Cli({"wave", "pack", "--in", P("p.json"), "--keys", "0"}).code, 1);
  Outcome a = Cli({"wave", "pack", "--in", P("p.json"), "--layers", "2", "--seed", "5"});
  Outcome b = Cli({"wave", "pack", "--in", P("p.json"), "--layers", "2", "--seed", "5"});
  EXPECT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
}

TEST_F(CliTest, AssemblerErrorIsExitTwo) {
  WriteFile(P("bad.s"), "nop\nfrob\n");
  Outcome o = Cli({"wave", "assemble", "--in", P("bad.s")});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("line 2"), std::string::npos) << o.err;
}

TEST_F(CliTest, StepBudgetIsExitTwo) {
  WriteFile(P("loop.s"), "l: jmp l\n");
  ASSERT_EQ(Cli({"wave", "assemble", "--in", P("loop.s"), "--out", P("l.json")}).code, 0);
  EXPECT_EQ(Cli({"wave", "run", "--in", P("l.json"), "--out", P("r"), "--max-steps",
                 "50"}).code,
            2);
}

}  // namespace
}  // namespace waveline::cli
