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


#include "support/fixtures.h"

#include <algorithm>
#include <map>
#include <random>
#include <tuple>

#include "waveline/toy_isa.h"

namespace waveline::testing {
namespace {

using corpus::FunctionRecord;
using corpus::Instruction;
using corpus::SampleCorpus;

Instruction Insn(std::string mnemonic, std::vector<std::string> operands) {
  Instruction insn;
  insn.mnemonic = std::move(mnemonic);
  insn.operands = std::move(operands);
  return insn;
}

std::string InsnText(const Instruction& insn) {
  std::string s = insn.mnemonic;
  for (size_t i = 0; i < insn.operands.size(); ++i) {
    s += i == 0 ? " " : ", ";
    s += insn.operands[i];
  }
  return s;
}

// Lays out instructions back to back from `entry` and derives raw bytes
// from their text.
FunctionRecord Layout(std::vector<Instruction> insns, uint64_t entry) {
  FunctionRecord f;
  f.entry = entry;
  std::string text;
  for (size_t i = 0; i < insns.size(); ++i) {
    insns[i].address = entry + i;
    insns[i].size = 1;
    text += InsnText(insns[i]);
    text.push_back('\n');
  }
  f.raw_bytes.assign(text.begin(), text.end());
  f.instructions = std::move(insns);
  return f;
}

// Base-3 digits of `variant` spelled with the three padding forms.
std::vector<Instruction> VariantPadding(int variant) {
  std::vector<Instruction> pad;
  int v = variant;
  do {
    switch (v % 3) {
      case 0: pad.push_back(Insn("nop", {})); break;
      case 1: pad.push_back(Insn("mov", {"r1", "r1"})); break;
      default: pad.push_back(Insn("xchg", {"r2", "r2"})); break;
    }
    v /= 3;
  } while (v > 0);
  return pad;
}

std::vector<int> Range(int lo, int hi) {  // [lo, hi)
  std::vector<int> out;
  for (int i = lo; i < hi; ++i) out.push_back(i);
  return out;
}

std::vector<int> Union(std::vector<int> a, const std::vector<int>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

std::vector<int> Minus(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

bool IsOraclePadding(const Instruction& insn) {
  if (insn.mnemonic == "nop") return true;
  return (insn.mnemonic == "mov" || insn.mnemonic == "xchg") &&
         insn.operands.size() == 2 && insn.operands[0] == insn.operands[1];
}

std::vector<Instruction> OracleStrip(const std::vector<Instruction>& insns) {
  std::vector<Instruction> out;
  for (const Instruction& insn : insns) {
    if (!IsOraclePadding(insn)) out.push_back(insn);
  }
  return out;
}

uint64_t MulMod61(uint64_t a, uint64_t b) {
  const unsigned __int128 m = (static_cast<unsigned __int128>(1) << 61) - 1;
  return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

std::vector<uint64_t> SievePrimes(size_t count) {
  std::vector<uint64_t> primes;
  for (uint64_t n = 2; primes.size() < count; ++n) {
    bool prime = true;
    for (uint64_t p : primes) {
      if (p * p > n) break;
      if (n % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(n);
  }
  return primes;
}

}  // namespace

std::vector<Instruction> FixtureInstructions(int id) {
  const int d0 = (id / 100) % 10;
  const int d1 = (id / 10) % 10;
  const int d2 = id % 10;
  std::vector<Instruction> insns;
  insns.push_back(Insn("a" + std::to_string(d0), {"r0", "#" + std::to_string(id)}));
  insns.push_back(Insn("b" + std::to_string(d1), {"r1"}));
  insns.push_back(Insn("c" + std::to_string(d2), {"r2", "r3"}));
  for (int i = 0; i < id % 6; ++i) insns.push_back(Insn("f", {"r4"}));
  return insns;
}

SampleCorpus FixtureSample(const std::vector<int>& function_ids,
                           const std::string& sample_id, int variant) {
  SampleCorpus s;
  s.sample_id = sample_id;
  s.family = "fixture";
  const std::vector<Instruction> pad = VariantPadding(variant);
  uint64_t addr = 0x1000;
  const size_t n = function_ids.size();
  for (size_t k = 0; k < n; ++k) {
    const int id = function_ids[(k + static_cast<size_t>(variant)) % n];
    std::vector<Instruction> body = FixtureInstructions(id);
    std::rotate(body.begin(), body.begin() + (variant % body.size()),
                body.end());
    body.insert(body.begin() + static_cast<long>(body.size() / 2), pad.begin(),
                pad.end());
    FunctionRecord f = Layout(std::move(body), addr);
    addr += f.raw_bytes.size() + 16;
    s.functions.push_back(std::move(f));
  }
  return s;
}

std::vector<FixtureVersion> ChainFamilyVersions() {
  return {
      {"A", Range(0, 16), 5},
      {"B", Range(0, 367), 95},
      {"C", Range(0, 379), 31},
  };
}

std::vector<FixtureVersion> BranchFamilyVersions() {
  const std::vector<int> r = Range(0, 13);
  const std::vector<int> v335 = Range(0, 335);
  const std::vector<int> v618a = Union(Union(r, Range(13, 215)), Range(335, 738));
  const std::vector<int> d1 = Range(13, 22);
  const std::vector<int> v618b = Union(Minus(v618a, d1), Range(738, 747));
  const std::vector<int> v618c =
      Union(Minus(v618b, Range(335, 338)), Range(747, 750));
  const std::vector<int> v22 = Union(d1, Range(338, 351));
  return {
      {"v13", r, 66},       {"v335", v335, 17},   {"v618a", v618a, 273},
      {"v618b", v618b, 811}, {"v618c", v618c, 76}, {"v22", v22, 111},
  };
}

HashedFixture HashFixture(const std::vector<FixtureVersion>& versions) {
  std::set<std::string> universe = {"f", "nop", "mov", "xchg"};
  for (char c : std::string("abc")) {
    for (int d = 0; d < 10; ++d) universe.insert(std::string(1, c) + std::to_string(d));
  }
  const hashing::PrimeTable table = hashing::PrimeTable::Build(universe);
  const corpus::PaddingConfig padding;
  HashedFixture out;
  for (const FixtureVersion& v : versions) {
    for (int j = 0; j < v.samples; ++j) {
      const SampleCorpus s =
          FixtureSample(v.functions, v.name + "-" + std::to_string(j), j);
      out.spp.push_back(
          hashing::HashSample(s, hashing::HashKind::kSpp, table, padding));
      out.raw.push_back(
          hashing::HashSample(s, hashing::HashKind::kRaw, table, padding));
    }
  }
  return out;
}

std::set<std::tuple<std::string, std::string, std::string>> LabelledEdges(
    const lineage::LineageGraph& graph) {
  auto label = [&](int id) {
    const lineage::VersionNode& n = graph.nodes[static_cast<size_t>(id)];
    return std::to_string(n.functions().size()) + "," +
           std::to_string(n.members.size());
  };
  std::set<std::tuple<std::string, std::string, std::string>> out;
  for (const lineage::Edge& e : graph.edges) {
    out.emplace(label(e.src), label(e.dst),
                std::to_string(e.shared) +
                    (e.kind == lineage::EdgeKind::kCross ? "*" : ""));
  }
  return out;
}

uint64_t OracleSpp(const std::vector<std::string>& mnemonics,
                   const std::set<std::string>& universe) {
  const std::vector<uint64_t> primes = SievePrimes(universe.size());
  std::map<std::string, uint64_t> prime_of;
  size_t i = 0;
  for (const std::string& m : universe) prime_of[m] = primes[i++];
  uint64_t product = 1;
  for (const std::string& m : mnemonics) product = MulMod61(product, prime_of.at(m));
  return product;
}

std::vector<std::set<std::string>> OraclePartition(
    const std::vector<SampleCorpus>& samples, hashing::HashKind kind) {
  std::map<std::set<std::string>, std::set<std::string>> groups;
  for (const SampleCorpus& s : samples) {
    std::set<std::string> key;
    for (const FunctionRecord& f : s.functions) {
      const std::vector<Instruction> kept = OracleStrip(f.instructions);
      if (kept.size() < 3) continue;
      if (kind == hashing::HashKind::kRaw) {
        key.insert(std::string(f.raw_bytes.begin(), f.raw_bytes.end()));
      } else {
        std::vector<std::string> ms;
        for (const Instruction& insn : kept) ms.push_back(insn.mnemonic);
        std::sort(ms.begin(), ms.end());
        std::string joined;
        for (const std::string& m : ms) joined += m + " ";
        key.insert(joined);
      }
    }
    groups[key].insert(s.sample_id);
  }
  std::vector<std::set<std::string>> out;
  for (auto& [key, ids] : groups) out.push_back(std::move(ids));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<SampleCorpus> RandomCorpus(uint64_t seed, int max_samples,
                                       int max_functions) {
  static const std::vector<std::string> kMnemonics = {
      "add", "sub", "xor", "and", "or",  "push", "pop",
      "call", "jmp", "cmp", "mov", "lea", "shl", "nop"};
  std::mt19937_64 rng(seed);
  auto uniform = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  auto reg = [&] { return "r" + std::to_string(uniform(0, 3)); };

  const int pool_size = uniform(3, std::max(3, max_functions * 2));
  std::vector<std::vector<Instruction>> pool;
  for (int p = 0; p < pool_size; ++p) {
    std::vector<Instruction> body;
    const int len = uniform(1, 8);
    for (int i = 0; i < len; ++i) {
      const std::string& m = kMnemonics[static_cast<size_t>(
          uniform(0, static_cast<int>(kMnemonics.size()) - 1))];
      body.push_back(Insn(m, {reg(), reg()}));
    }
    pool.push_back(std::move(body));
  }

  auto build = [&](const std::vector<int>& picks, const std::string& id) {
    SampleCorpus s;
    s.sample_id = id;
    uint64_t addr = 0x400;
    for (int p : picks) {
      std::vector<Instruction> body = pool[static_cast<size_t>(p)];
      std::shuffle(body.begin(), body.end(), rng);
      if (uniform(0, 2) == 0) {
        body.insert(body.begin() + uniform(0, static_cast<int>(body.size())),
                    Insn("nop", {}));
      }
      FunctionRecord f = Layout(std::move(body), addr);
      addr += f.raw_bytes.size() + static_cast<uint64_t>(uniform(1, 8));
      s.functions.push_back(std::move(f));
    }
    return s;
  };

  const int n_samples = uniform(1, std::max(1, max_samples));
  std::vector<std::vector<int>> picks_of;
  std::vector<SampleCorpus> out;
  for (int i = 0; i < n_samples; ++i) {
    std::vector<int> picks;
    if (!picks_of.empty() && uniform(0, 2) == 0) {
      picks = picks_of[static_cast<size_t>(
          uniform(0, static_cast<int>(picks_of.size()) - 1))];
      std::shuffle(picks.begin(), picks.end(), rng);
    } else {
      const int count = uniform(1, std::max(1, max_functions));
      for (int k = 0; k < count; ++k) picks.push_back(uniform(0, pool_size - 1));
    }
    picks_of.push_back(picks);
    out.push_back(build(picks, "s" + std::to_string(i)));
  }
  return out;
}

std::vector<std::vector<Instruction>> DecryptedStubs(
    const wave::PackResult& packed) {
  const wave::ToyProgram& prog = packed.program;
  std::vector<std::vector<Instruction>> out;
  for (const wave::StubInfo& stub : packed.stubs) {
    Bytes plain(prog.image.begin() + (stub.entry - prog.base),
                prog.image.begin() + (stub.entry - prog.base + stub.size));
    for (uint32_t off = 0; off < stub.size; ++off) {
      const uint32_t addr = stub.entry + off;
      for (const wave::StubInfo& layer : packed.stubs) {
        if (addr >= layer.body_start && addr < layer.body_end) {
          plain[off] ^= layer.key;
        }
      }
    }
    std::vector<Instruction> insns;
    for (uint32_t off = 0; off + wave::kInsnSize <= stub.size;
         off += wave::kInsnSize) {
      auto d = wave::Decode(std::span<const uint8_t>(plain).subspan(off, wave::kInsnSize));
      if (d) insns.push_back(wave::ToCorpusInstruction(*d, stub.entry + off));
    }
    out.push_back(std::move(insns));
  }
  return out;
}

}  // namespace waveline::testing
