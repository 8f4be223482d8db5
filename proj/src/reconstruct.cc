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

#include "waveline/reconstruct.h"

#include <algorithm>
#include <map>
#include <set>

#include "waveline/toy_isa.h"

namespace waveline::wave {

namespace {

struct View {
  uint32_t virtual_start = 0;
  uint32_t orig_start = 0;
  const Bytes* bytes = nullptr;

  uint32_t virtual_end() const {
    return virtual_start + static_cast<uint32_t>(bytes->size());
  }
  bool Holds(uint32_t va) const {
    return va >= virtual_start && va + kInsnSize <= virtual_end();
  }
  std::span<const uint8_t> At(uint32_t va) const {
    return std::span<const uint8_t>(*bytes).subspan(va - virtual_start, kInsnSize);
  }
};

class Extractor {
 public:
  Extractor(std::vector<View> views, std::set<uint32_t> entries,
            std::vector<std::string>& diagnostics)
      : views_(std::move(views)),
        entries_(std::move(entries)),
        diagnostics_(diagnostics) {
    for (uint32_t e : entries_) {
      if (const View* v = Find(e)) entry_origs_.insert(Orig(*v, e));
    }
  }

  std::vector<corpus::FunctionRecord> Functions() {
    std::vector<corpus::FunctionRecord> out;
    for (uint32_t e : entries_) {
      if (auto f = Extent(e)) out.push_back(std::move(*f));
    }
    return out;
  }

  // Plain recursive traversal, no function boundaries.
  size_t Sweep(const std::set<uint32_t>& seeds) {
    std::set<uint32_t> seen;
    std::vector<uint32_t> work(seeds.begin(), seeds.end());
    while (!work.empty()) {
      uint32_t a = work.back();
      work.pop_back();
      if (seen.count(a)) continue;
      const View* v = Find(a);
      if (!v) continue;
      auto d = Decode(v->At(a));
      if (!d) continue;
      seen.insert(a);
      for (uint32_t n : Successors(*d, a, /*follow_calls=*/true)) work.push_back(n);
    }
    return seen.size();
  }

 private:
  const View* Find(uint32_t va) const {
    for (const View& v : views_) {
      if (v.Holds(va)) return &v;
    }
    return nullptr;
  }

  static uint32_t Orig(const View& v, uint32_t va) {
    return v.orig_start + (va - v.virtual_start);
  }

  static std::vector<uint32_t> Successors(const Decoded& d, uint32_t a,
                                          bool follow_calls) {
    switch (d.flow) {
      case Flow::kNext:
      case Flow::kIndirectCall:
        return {a + kInsnSize};
      case Flow::kCall:
        if (follow_calls) return {a + kInsnSize, *d.address};
        return {a + kInsnSize};
      case Flow::kJump:
        return {*d.address};
      case Flow::kCondJump:
        return {*d.address, a + kInsnSize};
      case Flow::kReturn:
      case Flow::kHalt:
      case Flow::kIndirectJump:
        return {};
    }
    return {};
  }

  void Note(uint32_t entry, uint32_t at, const std::string& what) {
    diagnostics_.push_back("function " + AddressToken(entry) + ": " + what +
                           " at " + AddressToken(at));
  }

  std::optional<corpus::FunctionRecord> Extent(uint32_t entry) {
    const View* home = Find(entry);
    if (!home) {
      Note(entry, entry, "entry outside loaded segments");
      return std::nullopt;
    }
    std::map<uint32_t, Decoded> body;
    std::vector<uint32_t> work{entry};
    while (!work.empty()) {
      uint32_t a = work.back();
      work.pop_back();
      if (body.count(a)) continue;
      if (a != entry) {
        if (entries_.count(a)) continue;
        const View* at = Find(a);
        if (at && entry_origs_.count(Orig(*at, a))) continue;
        if (a < entry) {
          Note(entry, a, "branch below entry");
          continue;
        }
        if (!home->Holds(a)) {
          Note(entry, a, "target outside segment");
          continue;
        }
      }
      auto d = Decode(home->At(a));
      if (!d) {
        Note(entry, a, "invalid opcode");
        continue;
      }
      for (uint32_t n : Successors(*d, a, /*follow_calls=*/false)) work.push_back(n);
      body.emplace(a, std::move(*d));
    }
    if (body.empty()) return std::nullopt;

    corpus::FunctionRecord f;
    f.entry = entry;
    const uint32_t end = body.rbegin()->first + kInsnSize;
    auto all = std::span<const uint8_t>(*home->bytes);
    auto raw = all.subspan(entry - home->virtual_start, end - entry);
    f.raw_bytes.assign(raw.begin(), raw.end());
    for (const auto& [addr, d] : body) {
      f.instructions.push_back(ToCorpusInstruction(d, addr));
    }
    return f;
  }

  std::vector<View> views_;
  std::set<uint32_t> entries_;
  std::set<uint32_t> entry_origs_;
  std::vector<std::string>& diagnostics_;
};

}  // namespace

ReconstructResult Reconstruct(const MergedDatabase& db,
                              std::span<const WaveArtifacts> waves,
                              std::string sample_id) {
  ReconstructResult result;
  std::vector<View> views;
  for (const Segment& s : db.segments) {
    views.push_back(View{s.virtual_start(), s.orig_start, &s.bytes});
  }
  std::set<uint32_t> seeds, entries;
  for (const WaveArtifacts& w : waves) {
    for (size_t i = 0; i < w.instruction_log.size(); ++i) {
      const LoggedInsn& insn = w.instruction_log[i];
      auto va = db.Translate(w.wave_index, insn.addr);
      if (!va) {
        result.diagnostics.push_back("wave " + std::to_string(w.wave_index) +
                                     ": logged address " + AddressToken(insn.addr) +
                                     " not loaded");
        continue;
      }
      seeds.insert(*va);
      if (i == 0 || insn.call_target) entries.insert(*va);
    }
  }
  Extractor extractor(std::move(views), std::move(entries), result.diagnostics);
  result.disassembled = extractor.Sweep(seeds);
  result.corpus.sample_id = std::move(sample_id);
  result.corpus.functions = extractor.Functions();
  return result;
}

corpus::SampleCorpus ProgramCorpus(const ToyProgram& program,
                                   std::string sample_id) {
  Validate(program);
  std::set<uint32_t> entries(program.function_table.begin(),
                             program.function_table.end());
  entries.insert(program.entry);
  std::vector<std::string> diagnostics;
  Extractor extractor({View{program.base, program.base, &program.image}},
                      std::move(entries), diagnostics);
  corpus::SampleCorpus out;
  out.sample_id = std::move(sample_id);
  out.functions = extractor.Functions();
  return out;
}

}  // namespace waveline::wave
