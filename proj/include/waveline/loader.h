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

// Loads wave statefiles into one merged, disassemblable address space.
//
// Ranges load in wave order. A range whose (original address, content MD5)
// was loaded before is skipped. A range overlapping an existing segment is
// placed 16 bytes past the highest linear end; absolute targets inside it
// that point back into the range are rewritten to the new location.
// Segment bases stay 0, so virtual and linear addresses coincide.

#ifndef WAVELINE_LOADER_H_
#define WAVELINE_LOADER_H_

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "waveline/vm.h"

namespace waveline::wave {

inline constexpr uint32_t kRelocationGap = 16;

enum class RangeFilter { kExecOnly, kAll };

std::optional<RangeFilter> ParseRangeFilter(std::string_view name);
std::string_view RangeFilterName(RangeFilter filter);

struct Segment {
  uint32_t linear_start = 0;
  uint32_t base = 0;
  int wave = 0;
  uint32_t orig_start = 0;
  bool relocated = false;
  Bytes bytes;  // after target rewriting
  std::string content_md5;  // of the bytes as loaded

  uint32_t length() const { return static_cast<uint32_t>(bytes.size()); }
  uint32_t virtual_start() const { return linear_start - (base << 4); }
  uint32_t virtual_end() const { return virtual_start() + length(); }
  bool operator==(const Segment&) const = default;
};

// Where a statefile range of a given wave ended up, dedup hits included.
struct RangeMapEntry {
  int wave = 0;
  uint32_t orig_start = 0;
  uint32_t length = 0;
  size_t segment = 0;
  bool operator==(const RangeMapEntry&) const = default;
};

struct MergedDatabase {
  std::vector<Segment> segments;
  std::set<std::pair<uint32_t, std::string>> loaded;  // (orig addr, md5 hex)
  std::vector<RangeMapEntry> range_map;

  // Virtual address of original address `orig` as seen during wave `wave`:
  // the latest range at or before that wave covering it.
  std::optional<uint32_t> Translate(int wave, uint32_t orig) const;
  const Segment* SegmentAt(uint32_t virtual_address) const;
  std::optional<uint32_t> OriginalAddress(uint32_t virtual_address) const;

  bool operator==(const MergedDatabase&) const = default;
};

// The regions the exec-only filter keeps: the runs of the wave 0 snapshot.
std::vector<StateRun> ImageRegions(std::span<const WaveArtifacts> waves);

MergedDatabase LoadRanges(std::span<const WaveArtifacts> waves,
                          RangeFilter filter);

std::string DatabaseToJson(const MergedDatabase& db);

}  // namespace waveline::wave

#endif  // WAVELINE_LOADER_H_
