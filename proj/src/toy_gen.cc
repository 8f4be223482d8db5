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

#include "waveline/toy_gen.h"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "waveline/error.h"
#include "waveline/toy_isa.h"

namespace waveline::wave {

namespace {

struct Line {
  std::string mnemonic;
  std::string text;
};

class Gen {
 public:
  explicit Gen(uint64_t seed) : rng_(seed) {}

  int Uniform(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }
  std::string Reg() { return "r" + std::to_string(Uniform(0, 6)); }
  std::string OtherReg(const std::string& r) {
    std::string o;
    do o = Reg(); while (o == r);
    return o;
  }
  std::string Scratch() {
    return AddressToken(kScratchBase + static_cast<uint32_t>(Uniform(0, 255)));
  }

  std::vector<Line> Body(const std::string& name) {
    static const char* kAlu[] = {"mov", "add", "sub", "xor", "cmp"};
    std::vector<Line> out;
    const int n = Uniform(3, 10);
    int skip = 0;
    for (int i = 0; i < n; ++i) {
      const int kind = Uniform(0, 9);
      if (kind <= 4) {
        std::string m = kAlu[Uniform(0, 4)];
        std::string rd = Reg();
        std::string src = Uniform(0, 1) ? OtherReg(rd) : "#" + std::to_string(Uniform(0, 500));
        out.push_back({m, m + " " + rd + ", " + src});
      } else if (kind == 5) {
        out.push_back({"load", "load " + Reg() + ", [" + Scratch() + "]"});
      } else if (kind == 6) {
        out.push_back({"store", "store [" + Scratch() + "], " + Reg()});
      } else if (kind == 7) {
        std::string r = Reg();
        out.push_back({"push", "push " + r});
        out.push_back({"pop", "pop " + OtherReg(r)});
      } else if (i + 1 < n) {
        // Forward branch over the next instruction.
        std::string label = name + "_skip" + std::to_string(skip++);
        out.push_back({"jz", "jz " + label});
        std::string rd = Reg();
        out.push_back({"add", "add " + rd + ", #" + std::to_string(Uniform(1, 9))});
        out.push_back({"", label + ":"});
      }
    }
    out.push_back({"ret", "ret"});
    return out;
  }

 private:
  std::mt19937_64 rng_;
};

std::string Key(const std::vector<Line>& body) {
  std::vector<std::string> ms;
  for (const Line& l : body) {
    if (!l.mnemonic.empty()) ms.push_back(l.mnemonic);
  }
  std::sort(ms.begin(), ms.end());
  std::string key;
  for (const auto& m : ms) key += m + ",";
  return key;
}

}  // namespace

GeneratedProgram RandomToyProgram(uint64_t seed, const ToyGenOptions& options) {
  if (options.min_functions < 2 || options.max_functions < options.min_functions) {
    throw UsageError("toy programs need 2 <= min_functions <= max_functions");
  }
  Gen gen(seed);
  const int count = gen.Uniform(options.min_functions, options.max_functions);
  std::set<std::string> keys;
  std::vector<std::pair<std::string, std::vector<Line>>> functions;
  while (static_cast<int>(functions.size()) < count) {
    std::string name = "f" + std::to_string(functions.size());
    auto body = gen.Body(name);
    if (!keys.insert(Key(body)).second) continue;
    functions.emplace_back(std::move(name), std::move(body));
  }

  std::vector<std::string> calls;
  for (const auto& f : functions) calls.push_back(f.first);
  for (int extra = gen.Uniform(0, 2); extra > 0; --extra) {
    calls.push_back(functions[gen.Uniform(0, count - 1)].first);
  }
  for (size_t i = calls.size(); i > 1; --i) {
    std::swap(calls[i - 1], calls[gen.Uniform(0, static_cast<int>(i) - 1)]);
  }
  std::vector<Line> main_body;
  for (const auto& c : calls) main_body.push_back({"call", "call " + c});
  main_body.push_back({"hlt", "hlt"});
  functions.emplace_back("main", std::move(main_body));
  for (size_t i = functions.size(); i > 1; --i) {
    std::swap(functions[i - 1], functions[gen.Uniform(0, static_cast<int>(i) - 1)]);
  }

  std::ostringstream src;
  src << ".org " << AddressToken(options.base) << "\n.entry main\n";
  for (const auto& f : functions) src << ".func " << f.first << "\n";
  for (const auto& [name, body] : functions) {
    src << "\n" << name << ":\n";
    for (const Line& l : body) {
      src << (l.mnemonic.empty() ? "" : "  ") << l.text << "\n";
    }
  }
  GeneratedProgram out;
  out.source = src.str();
  out.program = Assemble(out.source);
  return out;
}

}  // namespace waveline::wave
