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

#include "waveline/hashing.h"

#include <algorithm>
#include <cstdio>
#include <thread>
#include <unordered_map>

#include "json.hpp"
#include "waveline/error.h"

namespace waveline::hashing {

std::string_view HashKindName(HashKind kind) {
  return kind == HashKind::kRaw ? "raw" : "spp";
}

std::optional<HashKind> ParseHashKind(std::string_view name) {
  if (name == "raw") return HashKind::kRaw;
  if (name == "spp") return HashKind::kSpp;
  return std::nullopt;
}

std::vector<uint64_t> FirstPrimes(size_t count) {
  std::vector<uint64_t> primes;
  primes.reserve(count);
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

PrimeTable PrimeTable::Build(const std::set<std::string>& mnemonics) {
  PrimeTable table;
  std::vector<uint64_t> primes = FirstPrimes(mnemonics.size());
  size_t i = 0;
  for (const std::string& m : mnemonics) {  // std::set iterates sorted
    table.entries_.emplace(m, primes[i++]);
    table.order_.push_back(m);
  }
  return table;
}

PrimeTable PrimeTable::FromJson(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("prime table: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("prime table: expected object");
  PrimeTable table;
  std::set<uint64_t> seen;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!it.value().is_number_unsigned()) {
      throw InputError("prime table: value of '" + it.key() +
                       "' is not an unsigned integer");
    }
    uint64_t p = it.value().get<uint64_t>();
    if (!seen.insert(p).second) {
      throw InputError("prime table: prime " + std::to_string(p) +
                       " assigned twice");
    }
    table.entries_.emplace(it.key(), p);
    table.order_.push_back(it.key());
  }
  return table;
}

std::optional<uint64_t> PrimeTable::Find(std::string_view mnemonic) const {
  auto it = entries_.find(mnemonic);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

uint64_t PrimeTable::PrimeOf(std::string_view mnemonic) const {
  auto p = Find(mnemonic);
  if (!p) {
    throw InputError("unknown mnemonic '" + std::string(mnemonic) +
                     "' (prime table must cover the whole corpus)");
  }
  return *p;
}

std::string PrimeTable::ToJson() const {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const std::string& m : order_) doc[m] = entries_.at(m);
  return doc.dump(2) + "\n";
}

std::string FunctionHash::Hex() const {
  char buf[33];
  if (kind == HashKind::kRaw) {
    std::snprintf(buf, sizeof(buf), "%016llx%016llx",
                  static_cast<unsigned long long>(hi),
                  static_cast<unsigned long long>(lo));
  } else {
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(lo));
  }
  return buf;
}

FunctionHash RawHash(std::span<const uint8_t> bytes) {
  Md5Digest d = Md5(bytes);
  FunctionHash h{HashKind::kRaw, 0, 0};
  for (int i = 0; i < 8; ++i) h.hi = (h.hi << 8) | d[i];
  for (int i = 8; i < 16; ++i) h.lo = (h.lo << 8) | d[i];
  return h;
}

FunctionHash RawHash(const corpus::FunctionRecord& f) {
  return RawHash(f.raw_bytes);
}

namespace {

uint64_t MulMod(uint64_t a, uint64_t b) {
  unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  // Mersenne reduction: 2^61 == 1 (mod m).
  uint64_t lo = static_cast<uint64_t>(p & kSppModulus);
  uint64_t hi = static_cast<uint64_t>(p >> 61);
  uint64_t r = lo + hi;
  if (r >= kSppModulus) r -= kSppModulus;
  return r;
}

}  // namespace

FunctionHash SppHash(std::span<const corpus::Instruction> insns,
                     const PrimeTable& table) {
  uint64_t product = 1;
  for (const corpus::Instruction& insn : insns) {
    product = MulMod(product, table.PrimeOf(insn.mnemonic) % kSppModulus);
  }
  return FunctionHash{HashKind::kSpp, 0, product};
}

FunctionHash SppHash(const corpus::NormalizedFunction& f,
                     const PrimeTable& table) {
  return SppHash(f.instructions, table);
}

ProgramHash MakeProgramHash(std::span<const FunctionHash> hashes,
                            HashKind kind) {
  ProgramHash out;
  out.kind = kind;
  out.function_hashes.assign(hashes.begin(), hashes.end());
  for (const FunctionHash& h : out.function_hashes) {
    if (h.kind != kind) {
      throw UsageError("program hash over mixed function-hash kinds");
    }
  }
  std::sort(out.function_hashes.begin(), out.function_hashes.end());
  out.function_hashes.erase(
      std::unique(out.function_hashes.begin(), out.function_hashes.end()),
      out.function_hashes.end());
  // Same kind and fixed width, so numeric order equals hex order.
  std::string joined;
  joined.reserve(out.function_hashes.size() * 33);
  for (size_t i = 0; i < out.function_hashes.size(); ++i) {
    if (i > 0) joined.push_back('|');
    joined += out.function_hashes[i].Hex();
  }
  out.value = Md5(joined);
  return out;
}

HashedSample HashSample(const corpus::SampleCorpus& sample, HashKind kind,
                        const PrimeTable& table,
                        const corpus::PaddingConfig& padding) {
  std::vector<std::pair<FunctionHash, uint32_t>> hashed;
  hashed.reserve(sample.functions.size());
  for (const corpus::FunctionRecord& f : sample.functions) {
    auto norm = corpus::Normalize(f, padding);
    if (!norm) continue;
    FunctionHash h = kind == HashKind::kRaw ? RawHash(f) : SppHash(*norm, table);
    hashed.emplace_back(h, static_cast<uint32_t>(norm->instruction_count()));
  }
  HashedSample out;
  out.sample_id = sample.sample_id;
  out.n_functions = hashed.size();
  std::vector<FunctionHash> hashes;
  hashes.reserve(hashed.size());
  for (const auto& [h, count] : hashed) hashes.push_back(h);
  out.program = MakeProgramHash(hashes, kind);

  std::unordered_map<FunctionHash, uint32_t, FunctionHashHasher> counts;
  for (const auto& [h, count] : hashed) counts.emplace(h, count);
  out.instruction_counts.reserve(out.program.function_hashes.size());
  for (const FunctionHash& h : out.program.function_hashes) {
    out.instruction_counts.push_back(counts.at(h));
  }
  return out;
}

std::vector<HashedSample> HashSamples(
    std::span<const corpus::SampleCorpus> samples, HashKind kind,
    const PrimeTable& table, const corpus::PaddingConfig& padding) {
  std::vector<HashedSample> out(samples.size());
  const size_t workers = std::clamp<size_t>(
      std::thread::hardware_concurrency(), 1, 16);
  if (workers == 1 || samples.size() < 64) {
    for (size_t i = 0; i < samples.size(); ++i) {
      out[i] = HashSample(samples[i], kind, table, padding);
    }
    return out;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  for (size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (size_t i = w; i < samples.size(); i += workers) {
          out[i] = HashSample(samples[i], kind, table, padding);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::string HashDumpCsv(std::span<const corpus::SampleCorpus> samples,
                        const PrimeTable& table,
                        const corpus::PaddingConfig& padding) {
  std::vector<HashedSample> raw =
      HashSamples(samples, HashKind::kRaw, table, padding);
  std::vector<HashedSample> spp =
      HashSamples(samples, HashKind::kSpp, table, padding);
  std::string out = "sample_id,program_hash_raw,program_hash_spp,n_functions\n";
  for (size_t i = 0; i < samples.size(); ++i) {
    out += samples[i].sample_id + "," + raw[i].program.Hex() + "," +
           spp[i].program.Hex() + "," + std::to_string(spp[i].n_functions) +
           "\n";
  }
  return out;
}

}  // namespace waveline::hashing
