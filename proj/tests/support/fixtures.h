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

// Shared fixtures and independent oracles for the unit and acceptance
// suites.

#ifndef WAVELINE_TESTS_SUPPORT_FIXTURES_H_
#define WAVELINE_TESTS_SUPPORT_FIXTURES_H_

#include <cstdint>
#include <map>
#include <tuple>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "waveline/corpus.h"
#include "waveline/hashing.h"
#include "waveline/lineage.h"
#include "waveline/packer.h"

namespace waveline::testing {

// Function `id` has 3..8 instructions over mnemonics that spell out its
// decimal digits, so distinct ids never share a mnemonic multiset.
std::vector<corpus::Instruction> FixtureInstructions(int id);

// One sample holding the given functions. `variant` picks the padding and
// layout, so different variants differ in raw bytes only.
corpus::SampleCorpus FixtureSample(const std::vector<int>& function_ids,
                                   const std::string& sample_id, int variant);

struct FixtureVersion {
  std::string name;
  std::vector<int> functions;
  int samples = 0;
};

// Three nested versions labelled 16/5, 367/95 and 379/31.
std::vector<FixtureVersion> ChainFamilyVersions();
// Six versions: chain 13/66, 335/17, 618/273, 618/811, 618/76 and a branch
// 22/111 off the first 618 version.
std::vector<FixtureVersion> BranchFamilyVersions();

struct HashedFixture {
  std::vector<hashing::HashedSample> spp;
  std::vector<hashing::HashedSample> raw;
};

// Builds and hashes every sample one at a time.
HashedFixture HashFixture(const std::vector<FixtureVersion>& versions);

// Edges as (src label, dst label, edge label) with DOT-style labels.
std::set<std::tuple<std::string, std::string, std::string>> LabelledEdges(
    const lineage::LineageGraph& graph);

// Independent SPP: product of primes assigned to the sorted mnemonic
// universe, reduced mod 2^61 - 1 through 128-bit arithmetic.
uint64_t OracleSpp(const std::vector<std::string>& mnemonics,
                   const std::set<std::string>& universe);

// Brute-force Phase I: samples grouped by equality of their normalized
// function sets, compared as sets of sorted mnemonic multisets (SPP) or of
// raw byte strings (raw).
std::vector<std::set<std::string>> OraclePartition(
    const std::vector<corpus::SampleCorpus>& samples, hashing::HashKind kind);

// Random corpora with deliberate duplicates drawn from a small pool.
std::vector<corpus::SampleCorpus> RandomCorpus(uint64_t seed, int max_samples,
                                               int max_functions);

// Undoes every packing layer of `packed` and returns the plaintext bytes of
// the stubs, innermost first.
std::vector<std::vector<corpus::Instruction>> DecryptedStubs(
    const wave::PackResult& packed);

}  // namespace waveline::testing

#endif  // WAVELINE_TESTS_SUPPORT_FIXTURES_H_
