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

#include "waveline/loader.h"

#include <algorithm>

#include "json.hpp"
#include "waveline/toy_isa.h"

namespace waveline::wave {

std::optional<RangeFilter> ParseRangeFilter(std::string_view name) {
  if (name == "exec-only") return RangeFilter::kExecOnly;
  if (name == "all") return RangeFilter::kAll;
  return std::nullopt;
}

std::string_view RangeFilterName(RangeFilter filter) {
  return filter == RangeFilter::kExecOnly ? "exec-only" : "all";
}

std::optional<uint32_t> MergedDatabase::Translate(int wave, uint32_t orig) const {
  const RangeMapEntry* best = nullptr;
  for (const RangeMapEntry& e : range_map) {
    if (e.wave > wave || orig < e.orig_start || orig >= e.orig_start + e.length) {
      continue;
    }
    if (!best || e.wave >= best->wave) best = &e;
  }
  if (!best) return std::nullopt;
  return segments[best->segment].virtual_start() + (orig - best->orig_start);
}

const Segment* MergedDatabase::SegmentAt(uint32_t va) const {
  for (const Segment& s : segments) {
    if (va >= s.virtual_start() && va < s.virtual_end()) return &s;
  }
  return nullptr;
}

std::optional<uint32_t> MergedDatabase::OriginalAddress(uint32_t va) const {
  const Segment* s = SegmentAt(va);
  if (!s) return std::nullopt;
  return s->orig_start + (va - s->virtual_start());
}

std::vector<StateRun> ImageRegions(std::span<const WaveArtifacts> waves) {
  if (waves.empty()) return {};
  return waves.front().statefile;
}

namespace {

std::vector<StateRun> Clip(const StateRun& run,
                           std::span<const StateRun> regions) {
  std::vector<StateRun> out;
  for (const StateRun& region : regions) {
    uint32_t lo = std::max(run.addr, region.addr);
    uint32_t hi = std::min(run.end(), region.end());
    if (lo >= hi) continue;
    out.push_back(StateRun{
        lo, Bytes(run.bytes.begin() + (lo - run.addr),
                  run.bytes.begin() + (hi - run.addr))});
  }
  return out;
}

void RewriteTargets(Segment& seg) {
  const uint32_t orig_end = seg.orig_start + seg.length();
  for (uint32_t off = (kInsnSize - seg.orig_start % kInsnSize) % kInsnSize;
       off + kInsnSize <= seg.length(); off += kInsnSize) {
    auto word = std::span<const uint8_t>(seg.bytes).subspan(off, kInsnSize);
    auto d = Decode(word);
    if (!d || !d->address) continue;
    if (*d->address < seg.orig_start || *d->address >= orig_end) continue;
    InsnBytes insn;
    std::copy(word.begin(), word.end(), insn.begin());
    insn = WithAddress(insn, seg.virtual_start() + (*d->address - seg.orig_start));
    std::copy(insn.begin(), insn.end(), seg.bytes.begin() + off);
  }
}

}  // namespace

MergedDatabase LoadRanges(std::span<const WaveArtifacts> waves,
                          RangeFilter filter) {
  MergedDatabase db;
  const std::vector<StateRun> regions = ImageRegions(waves);
  for (const WaveArtifacts& wave : waves) {
    std::vector<StateRun> runs;
    for (const StateRun& run : wave.statefile) {
      if (filter == RangeFilter::kAll) {
        runs.push_back(run);
      } else {
        auto clipped = Clip(run, regions);
        runs.insert(runs.end(), clipped.begin(), clipped.end());
      }
    }
    for (StateRun& run : runs) {
      if (run.bytes.empty()) continue;
      const uint32_t len = static_cast<uint32_t>(run.bytes.size());
      auto key = std::make_pair(run.addr, Md5Hex(run.bytes));
      if (db.loaded.count(key)) {
        for (size_t i = 0; i < db.segments.size(); ++i) {
          const Segment& s = db.segments[i];
          if (s.orig_start == run.addr && s.content_md5 == key.second) {
            db.range_map.push_back(RangeMapEntry{wave.wave_index, run.addr, len, i});
            break;
          }
        }
        continue;
      }
      bool overlaps = false;
      uint32_t max_end = 0;
      for (const Segment& s : db.segments) {
        max_end = std::max(max_end, s.linear_start + s.length());
        if (run.addr < s.linear_start + s.length() && s.linear_start < run.addr + len) {
          overlaps = true;
        }
      }
      Segment seg;
      seg.wave = wave.wave_index;
      seg.orig_start = run.addr;
      seg.bytes = std::move(run.bytes);
      seg.content_md5 = key.second;
      if (overlaps) {
        seg.linear_start = max_end + kRelocationGap;
        seg.relocated = true;
        RewriteTargets(seg);
      } else {
        seg.linear_start = seg.orig_start;
      }
      db.range_map.push_back(
          RangeMapEntry{wave.wave_index, seg.orig_start, len, db.segments.size()});
      db.segments.push_back(std::move(seg));
      db.loaded.insert(std::move(key));
    }
  }
  return db;
}

std::string DatabaseToJson(const MergedDatabase& db) {
  nlohmann::ordered_json j;
  j["segments"] = nlohmann::ordered_json::array();
  for (const Segment& s : db.segments) {
    nlohmann::ordered_json js;
    js["linear"] = s.linear_start;
    js["length"] = s.length();
    js["base"] = s.base;
    js["virtual"] = s.virtual_start();
    js["wave"] = s.wave;
    js["orig"] = s.orig_start;
    js["relocated"] = s.relocated;
    js["md5"] = s.content_md5;
    j["segments"].push_back(std::move(js));
  }
  j["loaded"] = nlohmann::ordered_json::array();
  for (const auto& [addr, md5] : db.loaded) {
    j["loaded"].push_back({{"addr", addr}, {"md5", md5}});
  }
  j["ranges"] = nlohmann::ordered_json::array();
  for (const RangeMapEntry& e : db.range_map) {
    j["ranges"].push_back(
        {{"wave", e.wave}, {"orig", e.orig_start}, {"length", e.length}, {"segment", e.segment}});
  }
  return j.dump(2) + "\n";
}

}  // namespace waveline::wave
