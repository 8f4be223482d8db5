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

// Raw and small-prime-product (SPP) function hashes and per-sample program
// hashes.
//
// The SPP hash maps every mnemonic to a small prime and multiplies the primes
// of a function's padding-free instructions, so it is blind to instruction
// order and padding. Products are reduced modulo the Mersenne prime 2^61 - 1.

#ifndef WAVELINE_HASHING_H_
#define WAVELINE_HASHING_H_

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "waveline/bytes.h"
#include "waveline/corpus.h"

namespace waveline::hashing {

enum class HashKind { kRaw, kSpp };

std::string_view HashKindName(HashKind kind);
std::optional<HashKind> ParseHashKind(std::string_view name);

inline constexpr uint64_t kSppModulus = (uint64_t{1} << 61) - 1;

// Returns the first `count` primes (2, 3, 5, ...).
std::vector<uint64_t> FirstPrimes(size_t count);

// Mnemonic -> prime. Built once per analysis over the full mnemonic universe
// and then frozen; persisted as {"mnemonic": prime, ...}.
class PrimeTable {
 public:
  PrimeTable() = default;

  // Sorted lexicographically; the i-th mnemonic gets the i-th prime.
  static PrimeTable Build(const std::set<std::string>& mnemonics);
  static PrimeTable FromJson(std::string_view text);

  // Throws InputError naming the mnemonic when it is not in the table.
  uint64_t PrimeOf(std::string_view mnemonic) const;
  std::optional<uint64_t> Find(std::string_view mnemonic) const;

  const std::vector<std::string>& registration_order() const { return order_; }
  size_t size() const { return order_.size(); }
  std::string ToJson() const;

  bool operator==(const PrimeTable&) const = default;

 private:
  std::map<std::string, uint64_t, std::less<>> entries_;
  std::vector<std::string> order_;
};

// Raw: full MD5 digest, big-endian in (hi, lo). SPP: residue in lo, hi = 0.
struct FunctionHash {
  HashKind kind = HashKind::kSpp;
  uint64_t hi = 0;
  uint64_t lo = 0;

  // 32 hex digits for raw, 16 for SPP, zero padded.
  std::string Hex() const;

  auto operator<=>(const FunctionHash&) const = default;
  bool operator==(const FunctionHash&) const = default;
};

struct FunctionHashHasher {
  size_t operator()(const FunctionHash& h) const {
    return static_cast<size_t>(h.lo ^ (h.hi * 0x9e3779b97f4a7c15ULL) ^
                               static_cast<uint64_t>(h.kind));
  }
};

FunctionHash RawHash(const corpus::FunctionRecord& f);
FunctionHash RawHash(std::span<const uint8_t> bytes);

// `insns` must already be padding-free.
FunctionHash SppHash(std::span<const corpus::Instruction> insns,
                     const PrimeTable& table);
FunctionHash SppHash(const corpus::NormalizedFunction& f,
                     const PrimeTable& table);

struct ProgramHash {
  HashKind kind = HashKind::kSpp;
  Md5Digest value{};
  std::vector<FunctionHash> function_hashes;  // sorted, duplicates collapsed

  std::string Hex() const { return HexEncode(value); }
  bool operator==(const ProgramHash&) const = default;
};

// Sorted lowercase fixed-width hex renderings joined with '|', then MD5.
// Throws UsageError if a hash of another kind is present.
ProgramHash MakeProgramHash(std::span<const FunctionHash> hashes,
                            HashKind kind);

// Everything Phase I and later phases need from one sample.
struct HashedSample {
  std::string sample_id;
  ProgramHash program;
  // Normalized instruction count per entry of program.function_hashes.
  std::vector<uint32_t> instruction_counts;
  // Functions that survived normalization (before duplicate collapse).
  size_t n_functions = 0;
};

// `table` is only consulted for the SPP kind.
HashedSample HashSample(const corpus::SampleCorpus& sample, HashKind kind,
                        const PrimeTable& table,
                        const corpus::PaddingConfig& padding);

// Hashes every sample, spreading the work over hardware threads. Output
// order matches input order.
std::vector<HashedSample> HashSamples(
    std::span<const corpus::SampleCorpus> samples, HashKind kind,
    const PrimeTable& table, const corpus::PaddingConfig& padding);

// Audit dump: "sample_id,program_hash_raw,program_hash_spp,n_functions".
std::string HashDumpCsv(std::span<const corpus::SampleCorpus> samples,
                        const PrimeTable& table,
                        const corpus::PaddingConfig& padding);

}  // namespace waveline::hashing

#endif  // WAVELINE_HASHING_H_
