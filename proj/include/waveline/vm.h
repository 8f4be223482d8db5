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

// Toy VM with write-then-execute wave detection.
//
// Every store marks the written bytes dirty. Before an instruction executes,
// if any of its four bytes is dirty the current wave ends; the next wave's
// statefile holds the current contents of the dirty bytes as maximal runs
// and the dirty set is cleared. Wave 0's statefile is the loaded image.

#ifndef WAVELINE_VM_H_
#define WAVELINE_VM_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "waveline/assembler.h"
#include "waveline/error.h"
#include "waveline/toy_isa.h"

namespace waveline::wave {

struct StateRun {
  uint32_t addr = 0;
  Bytes bytes;

  uint32_t end() const { return addr + static_cast<uint32_t>(bytes.size()); }
  bool operator==(const StateRun&) const = default;
};

struct LoggedInsn {
  uint32_t addr = 0;
  bool call_target = false;

  bool operator==(const LoggedInsn&) const = default;
};

struct WaveArtifacts {
  int wave_index = 0;
  std::vector<StateRun> statefile;
  // Unique executed addresses in first-execution order. The first entry is
  // where the wave started.
  std::vector<LoggedInsn> instruction_log;

  bool operator==(const WaveArtifacts&) const = default;
};

struct VmState {
  std::array<uint16_t, kRegisterCount> regs{};
  bool zero = false;
  uint32_t pc = 0;
  uint64_t steps = 0;
  bool halted = false;
  Bytes memory;
};

struct RunOptions {
  uint64_t max_steps = 1'000'000;
  // Keep a copy of memory as it was when each wave started.
  bool record_wave_images = false;
};

struct RunResult {
  uint32_t pid = 1;
  std::vector<WaveArtifacts> waves;
  VmState final_state;
  std::vector<Bytes> wave_images;
};

// Step budget exhaustion, invalid opcodes and memory faults. Carries what
// was recorded up to the failure, including the unfinished wave.
class VmError : public InputError {
 public:
  VmError(const std::string& what, std::optional<uint32_t> fault_address,
          RunResult partial)
      : InputError(what),
        fault_address_(fault_address),
        partial_(std::move(partial)) {}

  std::optional<uint32_t> fault_address() const { return fault_address_; }
  const RunResult& partial() const { return partial_; }

 private:
  std::optional<uint32_t> fault_address_;
  RunResult partial_;
};

RunResult RunAndUnpack(const ToyProgram& program, const RunOptions& options = {});

// Memory at the start of wave `wave`: statefiles 0..wave applied in order
// over zeroed memory.
Bytes OverlayStatefiles(std::span<const WaveArtifacts> waves, size_t wave);

}  // namespace waveline::wave

#endif  // WAVELINE_VM_H_
