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

#include "waveline/vm.h"

#include <string>

namespace waveline::wave {

namespace {

class Machine {
 public:
  Machine(const ToyProgram& program, const RunOptions& options)
      : options_(options),
        dirty_(kMemorySize, 0),
        log_index_(kMemorySize, -1) {
    state_.memory.assign(kMemorySize, 0);
    std::copy(program.image.begin(), program.image.end(),
              state_.memory.begin() + program.base);
    state_.pc = program.entry;
    current_.wave_index = 0;
    current_.statefile.push_back(StateRun{program.base, program.image});
    if (options_.record_wave_images) result_.wave_images.push_back(state_.memory);
  }

  RunResult Run() {
    while (!state_.halted) Step();
    Finish();
    return std::move(result_);
  }

 private:
  [[noreturn]] void Fault(const std::string& what, std::optional<uint32_t> addr) {
    Finish();
    throw VmError(what, addr, std::move(result_));
  }

  void Finish() {
    result_.waves.push_back(std::move(current_));
    current_ = {};
    result_.final_state = state_;
  }

  void CheckRange(uint32_t addr, uint32_t len) {
    if (addr + len > kMemorySize) {
      Fault("memory fault at " + AddressToken(addr) + " (pc " +
                AddressToken(state_.pc) + ")",
            state_.pc);
    }
  }

  uint8_t Read8(uint32_t addr) {
    CheckRange(addr, 1);
    return state_.memory[addr];
  }

  void Write8(uint32_t addr, uint8_t v) {
    CheckRange(addr, 1);
    state_.memory[addr] = v;
    dirty_[addr] = 1;
  }

  void Push(uint16_t v) {
    uint16_t& sp = state_.regs[kStackPointer];
    sp = static_cast<uint16_t>(sp - 2);
    Write8(sp, static_cast<uint8_t>(v));
    Write8(sp + 1u, static_cast<uint8_t>(v >> 8));
  }

  uint16_t Pop() {
    uint16_t& sp = state_.regs[kStackPointer];
    uint16_t v = static_cast<uint16_t>(Read8(sp) | (Read8(sp + 1u) << 8));
    sp = static_cast<uint16_t>(sp + 2);
    return v;
  }

  void NewWave() {
    for (const LoggedInsn& insn : current_.instruction_log) log_index_[insn.addr] = -1;
    result_.waves.push_back(std::move(current_));
    current_ = {};
    current_.wave_index = static_cast<int>(result_.waves.size());
    for (uint32_t a = 0; a < kMemorySize;) {
      if (!dirty_[a]) {
        ++a;
        continue;
      }
      StateRun run{a, {}};
      while (a < kMemorySize && dirty_[a]) {
        run.bytes.push_back(state_.memory[a]);
        dirty_[a++] = 0;
      }
      current_.statefile.push_back(std::move(run));
    }
    if (options_.record_wave_images) result_.wave_images.push_back(state_.memory);
  }

  void Log(uint32_t addr, bool call_target) {
    int32_t& idx = log_index_[addr];
    if (idx < 0) {
      idx = static_cast<int32_t>(current_.instruction_log.size());
      current_.instruction_log.push_back(LoggedInsn{addr, call_target});
    } else if (call_target) {
      current_.instruction_log[idx].call_target = true;
    }
  }

  void SetZero(uint16_t v) { state_.zero = v == 0; }

  void Step() {
    const uint32_t pc = state_.pc;
    if (state_.steps >= options_.max_steps) {
      Fault("step budget of " + std::to_string(options_.max_steps) +
                " exhausted at " + AddressToken(pc),
            pc);
    }
    CheckRange(pc, kInsnSize);
    bool dirty = false;
    for (uint32_t i = 0; i < kInsnSize; ++i) dirty |= dirty_[pc + i] != 0;
    if (dirty) NewWave();

    Log(pc, pending_call_);
    pending_call_ = false;
    auto d = Decode(std::span<const uint8_t>(state_.memory).subspan(pc, kInsnSize));
    if (!d) Fault("invalid opcode at " + AddressToken(pc), pc);
    ++state_.steps;

    auto& r = state_.regs;
    uint32_t next = pc + kInsnSize;
    const uint16_t src = (d->opcode % 2 == 0) ? r[d->rs] : d->imm;
    switch (d->opcode) {
      case 0x01:
        break;
      case 0x02:
        state_.halted = true;
        break;
      case 0x03:
        next = Pop();
        break;
      case 0x10:
      case 0x11:
        r[d->rd] = src;
        break;
      case 0x12:
      case 0x13:
        r[d->rd] = static_cast<uint16_t>(r[d->rd] + src);
        SetZero(r[d->rd]);
        break;
      case 0x14:
      case 0x15:
        r[d->rd] = static_cast<uint16_t>(r[d->rd] - src);
        SetZero(r[d->rd]);
        break;
      case 0x16:
      case 0x17:
        r[d->rd] = static_cast<uint16_t>(r[d->rd] ^ src);
        SetZero(r[d->rd]);
        break;
      case 0x18:
      case 0x19:
        SetZero(static_cast<uint16_t>(r[d->rd] - src));
        break;
      case 0x20:
        next = *d->address;
        break;
      case 0x21:
        next = r[d->rs];
        break;
      case 0x22:
        if (state_.zero) next = *d->address;
        break;
      case 0x23:
      case 0x24:
        Push(static_cast<uint16_t>(next));
        next = d->opcode == 0x23 ? *d->address : r[d->rs];
        pending_call_ = true;
        break;
      case 0x30:
        Push(r[d->rs]);
        break;
      case 0x31:
        r[d->rd] = Pop();
        break;
      case 0x50:
        r[d->rd] = Read8(r[d->rs]);
        break;
      case 0x51:
        Write8(r[d->rd], static_cast<uint8_t>(r[d->rs]));
        break;
      default:
        if (d->opcode >= 0x40 && d->opcode < 0x48) {
          r[d->rd] = Read8(*d->address);
        } else if (d->opcode >= 0x48 && d->opcode < 0x50) {
          Write8(*d->address, static_cast<uint8_t>(r[d->rs]));
        } else {
          Fault("invalid opcode at " + AddressToken(pc), pc);
        }
    }
    if (!state_.halted) state_.pc = next;
  }

  RunOptions options_;
  VmState state_;
  std::vector<uint8_t> dirty_;
  std::vector<int32_t> log_index_;
  WaveArtifacts current_;
  RunResult result_;
  bool pending_call_ = false;
};

}  // namespace

RunResult RunAndUnpack(const ToyProgram& program, const RunOptions& options) {
  Validate(program);
  return Machine(program, options).Run();
}

Bytes OverlayStatefiles(std::span<const WaveArtifacts> waves, size_t wave) {
  Bytes memory(kMemorySize, 0);
  for (size_t i = 0; i <= wave && i < waves.size(); ++i) {
    for (const StateRun& run : waves[i].statefile) {
      if (run.end() > kMemorySize) throw InputError("statefile run outside memory");
      std::copy(run.bytes.begin(), run.bytes.end(), memory.begin() + run.addr);
    }
  }
  return memory;
}

}  // namespace waveline::wave
