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

// On-disk run directories.
//
//   run.json            {"pid", "entry", "waves", "exec_regions": [{addr, length}]}
//   wave-NNN.state.json {"wave": i, "runs": [{"addr": uint, "bytes": hex}]}
//   wave-NNN.log.json   {"wave": i, "insns": [{"addr": uint, "call_target": bool}]}

#ifndef WAVELINE_WAVE_IO_H_
#define WAVELINE_WAVE_IO_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "waveline/vm.h"

namespace waveline::wave {

std::string StatefileToJson(const WaveArtifacts& wave);
std::string InstructionLogToJson(const WaveArtifacts& wave);

struct RunRecord {
  uint32_t pid = 1;
  uint32_t entry = 0;
  std::vector<WaveArtifacts> waves;
};

void WriteRun(const std::filesystem::path& dir, const RunResult& run,
              uint32_t entry);
RunRecord ReadRun(const std::filesystem::path& dir);

}  // namespace waveline::wave

#endif  // WAVELINE_WAVE_IO_H_
