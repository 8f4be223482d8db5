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

#include "waveline/wave_io.h"

#include <cstdio>

#include "json.hpp"
#include "waveline/loader.h"

namespace waveline::wave {

namespace {

using nlohmann::ordered_json;

std::string WaveFile(int wave, std::string_view kind) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "wave-%03d.%s.json", wave,
                std::string(kind).c_str());
  return buf;
}

}  // namespace

std::string StatefileToJson(const WaveArtifacts& wave) {
  ordered_json j;
  j["wave"] = wave.wave_index;
  j["runs"] = ordered_json::array();
  for (const StateRun& run : wave.statefile) {
    j["runs"].push_back({{"addr", run.addr}, {"bytes", HexEncode(run.bytes)}});
  }
  return j.dump() + "\n";
}

std::string InstructionLogToJson(const WaveArtifacts& wave) {
  ordered_json j;
  j["wave"] = wave.wave_index;
  j["insns"] = ordered_json::array();
  for (const LoggedInsn& insn : wave.instruction_log) {
    j["insns"].push_back({{"addr", insn.addr}, {"call_target", insn.call_target}});
  }
  return j.dump() + "\n";
}

void WriteRun(const std::filesystem::path& dir, const RunResult& run,
              uint32_t entry) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError("cannot create '" + dir.string() + "': " + ec.message());
  ordered_json manifest;
  manifest["pid"] = run.pid;
  manifest["entry"] = entry;
  manifest["waves"] = run.waves.size();
  manifest["exec_regions"] = ordered_json::array();
  for (const StateRun& r : ImageRegions(run.waves)) {
    manifest["exec_regions"].push_back({{"addr", r.addr}, {"length", r.bytes.size()}});
  }
  WriteFile(dir / "run.json", manifest.dump(2) + "\n");
  for (const WaveArtifacts& w : run.waves) {
    WriteFile(dir / WaveFile(w.wave_index, "state"), StatefileToJson(w));
    WriteFile(dir / WaveFile(w.wave_index, "log"), InstructionLogToJson(w));
  }
}

RunRecord ReadRun(const std::filesystem::path& dir) {
  RunRecord rec;
  std::string where;
  try {
    where = (dir / "run.json").string();
    auto manifest = nlohmann::json::parse(ReadFile(dir / "run.json"));
    rec.pid = manifest.at("pid").get<uint32_t>();
    rec.entry = manifest.at("entry").get<uint32_t>();
    const int count = manifest.at("waves").get<int>();
    for (int i = 0; i < count; ++i) {
      WaveArtifacts w;
      w.wave_index = i;
      where = (dir / WaveFile(i, "state")).string();
      auto state = nlohmann::json::parse(ReadFile(dir / WaveFile(i, "state")));
      if (state.at("wave").get<int>() != i) throw InputError(where + ": wrong wave index");
      for (const auto& r : state.at("runs")) {
        auto bytes = HexDecode(r.at("bytes").get<std::string>());
        if (!bytes) throw InputError(where + ": field 'bytes' is not valid hex");
        w.statefile.push_back(StateRun{r.at("addr").get<uint32_t>(), std::move(*bytes)});
      }
      where = (dir / WaveFile(i, "log")).string();
      auto log = nlohmann::json::parse(ReadFile(dir / WaveFile(i, "log")));
      if (log.at("wave").get<int>() != i) throw InputError(where + ": wrong wave index");
      for (const auto& insn : log.at("insns")) {
        w.instruction_log.push_back(
            LoggedInsn{insn.at("addr").get<uint32_t>(), insn.at("call_target").get<bool>()});
      }
      rec.waves.push_back(std::move(w));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(where + ": " + e.what());
  }
  return rec;
}

}  // namespace waveline::wave
