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

// Function corpus data model, the JSON Lines corpus format, and function
// normalization (padding removal plus the short-function filter).
//
// One corpus line describes one sample:
//
//   {"sample_id": str, "family": str|null,
//    "functions": [{"entry": uint, "raw_bytes": hex,
//                   "instructions": [{"addr": uint, "size": uint,
//                                     "mnemonic": str,
//                                     "operands": [str]}]}]}

#ifndef WAVELINE_CORPUS_H_
#define WAVELINE_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "waveline/bytes.h"

namespace waveline::corpus {

struct Instruction {
  std::string mnemonic;  // lowercase, non-empty
  std::vector<std::string> operands;
  uint64_t address = 0;
  uint32_t size = 1;

  bool operator==(const Instruction&) const = default;
};

struct FunctionRecord {
  uint64_t entry = 0;
  Bytes raw_bytes;  // authoritative input of the raw hash
  std::vector<Instruction> instructions;

  bool operator==(const FunctionRecord&) const = default;
};

struct SampleCorpus {
  std::string sample_id;
  std::optional<std::string> family;
  std::vector<FunctionRecord> functions;  // ascending, unique entries

  bool operator==(const SampleCorpus&) const = default;
};

// Instructions that carry no function semantics. `always` mnemonics are
// padding regardless of operands; `self_operand` mnemonics are padding only
// when given exactly two identical operand tokens (mov r1, r1).
struct PaddingConfig {
  std::set<std::string> always = {"nop"};
  std::set<std::string> self_operand = {"mov", "xchg"};

  static PaddingConfig Default() { return {}; }
  bool IsPadding(const Instruction& insn) const;
};

// Functions with at most this many instructions after padding removal carry
// no identity and are filtered.
inline constexpr size_t kMaxFilteredInstructions = 2;

struct NormalizedFunction {
  uint64_t origin_entry = 0;
  std::vector<Instruction> instructions;  // padding-free, size >= 3

  size_t instruction_count() const { return instructions.size(); }
};

std::vector<Instruction> StripPadding(std::span<const Instruction> insns,
                                      const PaddingConfig& padding);

// Returns nullopt when the function is filtered (<= 2 instructions left).
std::optional<NormalizedFunction> Normalize(const FunctionRecord& f,
                                            const PaddingConfig& padding);

// Checks every FunctionRecord/SampleCorpus invariant; throws InputError
// describing the first violation.
void Validate(const SampleCorpus& sample);

// Parses one JSON line. `line_number` only decorates error messages.
SampleCorpus ParseSampleLine(std::string_view line, size_t line_number);

// Order preserving. Blank lines are skipped. Throws InputError naming the
// line and field on malformed input, duplicate sample ids or duplicate
// function entries.
std::vector<SampleCorpus> ParseCorpus(std::istream& in);
std::vector<SampleCorpus> ParseCorpus(const std::filesystem::path& path);

// Concatenates several corpus files; sample ids must stay unique overall.
std::vector<SampleCorpus> ParseCorpora(
    std::span<const std::filesystem::path> paths);

// Byte-stable: one line per sample, keys in schema order, no whitespace.
std::string SerializeSample(const SampleCorpus& sample);
std::string SerializeCorpus(std::span<const SampleCorpus> samples);

// Union of every mnemonic appearing in the given samples.
std::set<std::string> CollectMnemonics(std::span<const SampleCorpus> samples);

}  // namespace waveline::corpus

#endif  // WAVELINE_CORPUS_H_
