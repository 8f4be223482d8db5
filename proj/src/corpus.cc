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

#include "waveline/corpus.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "waveline/error.h"

namespace waveline::corpus {

using nlohmann::json;
using nlohmann::ordered_json;

bool PaddingConfig::IsPadding(const Instruction& insn) const {
  if (always.contains(insn.mnemonic)) return true;
  return self_operand.contains(insn.mnemonic) && insn.operands.size() == 2 &&
         insn.operands[0] == insn.operands[1];
}

std::vector<Instruction> StripPadding(std::span<const Instruction> insns,
                                      const PaddingConfig& padding) {
  std::vector<Instruction> out;
  out.reserve(insns.size());
  for (const Instruction& insn : insns) {
    if (!padding.IsPadding(insn)) out.push_back(insn);
  }
  return out;
}

std::optional<NormalizedFunction> Normalize(const FunctionRecord& f,
                                            const PaddingConfig& padding) {
  std::vector<Instruction> kept = StripPadding(f.instructions, padding);
  if (kept.size() <= kMaxFilteredInstructions) return std::nullopt;
  return NormalizedFunction{f.entry, std::move(kept)};
}

namespace {

std::string FunctionContext(const std::string& sample_id, size_t index) {
  return "sample '" + sample_id + "' functions[" + std::to_string(index) + "]";
}

}  // namespace

void Validate(const SampleCorpus& sample) {
  if (sample.sample_id.empty()) throw InputError("empty sample_id");
  for (size_t i = 0; i < sample.functions.size(); ++i) {
    const FunctionRecord& f = sample.functions[i];
    const std::string where = FunctionContext(sample.sample_id, i);
    if (i > 0 && sample.functions[i - 1].entry >= f.entry) {
      if (sample.functions[i - 1].entry == f.entry) {
        throw InputError(where + ": duplicate function entry " +
                         std::to_string(f.entry));
      }
      throw InputError(where + ": functions not sorted by entry");
    }
    const uint64_t end = f.entry + f.raw_bytes.size();
    uint64_t prev_end = f.entry;
    for (size_t j = 0; j < f.instructions.size(); ++j) {
      const Instruction& insn = f.instructions[j];
      const std::string iw = where + ".instructions[" + std::to_string(j) + "]";
      if (insn.mnemonic.empty()) throw InputError(iw + ": empty mnemonic");
      for (char c : insn.mnemonic) {
        if (std::isupper(static_cast<unsigned char>(c))) {
          throw InputError(iw + ": mnemonic not lowercase");
        }
      }
      if (insn.size < 1) throw InputError(iw + ": size must be >= 1");
      if (insn.address < prev_end) {
        throw InputError(iw + ": instructions overlap or are not ascending");
      }
      if (insn.address + insn.size > end) {
        throw InputError(iw + ": instruction outside raw_bytes");
      }
      prev_end = insn.address + insn.size;
    }
  }
}

namespace {

class LineParser {
 public:
  explicit LineParser(size_t line) : line_(line) {}

  [[noreturn]] void Fail(const std::string& field,
                         const std::string& msg) const {
    throw InputError("line " + std::to_string(line_) + ": field '" + field +
                     "': " + msg);
  }

  const json& Member(const json& obj, const char* key,
                     const std::string& path) const {
    auto it = obj.find(key);
    if (it == obj.end()) Fail(path + key, "missing");
    return *it;
  }

  uint64_t Unsigned(const json& obj, const char* key,
                    const std::string& path) const {
    const json& v = Member(obj, key, path);
    if (!v.is_number_unsigned()) Fail(path + key, "expected unsigned integer");
    return v.get<uint64_t>();
  }

  std::string String(const json& obj, const char* key,
                     const std::string& path) const {
    const json& v = Member(obj, key, path);
    if (!v.is_string()) Fail(path + key, "expected string");
    return v.get<std::string>();
  }

  const json& Array(const json& obj, const char* key,
                    const std::string& path) const {
    const json& v = Member(obj, key, path);
    if (!v.is_array()) Fail(path + key, "expected array");
    return v;
  }

  SampleCorpus Parse(std::string_view text) const {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      Fail("<line>", std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) Fail("<line>", "expected object");

    SampleCorpus sample;
    sample.sample_id = String(doc, "sample_id", "");
    if (sample.sample_id.empty()) Fail("sample_id", "must be non-empty");
    const json& family = Member(doc, "family", "");
    if (family.is_string()) {
      sample.family = family.get<std::string>();
    } else if (!family.is_null()) {
      Fail("family", "expected string or null");
    }

    const json& functions = Array(doc, "functions", "");
    std::unordered_set<uint64_t> entries;
    for (size_t i = 0; i < functions.size(); ++i) {
      const std::string fpath = "functions[" + std::to_string(i) + "].";
      const json& fj = functions[i];
      if (!fj.is_object()) Fail(fpath, "expected object");
      FunctionRecord f;
      f.entry = Unsigned(fj, "entry", fpath);
      if (!entries.insert(f.entry).second) {
        Fail(fpath + "entry",
             "duplicate function entry " + std::to_string(f.entry));
      }
      std::string hex = String(fj, "raw_bytes", fpath);
      for (char c : hex) {
        if (std::isupper(static_cast<unsigned char>(c))) {
          Fail(fpath + "raw_bytes", "hex must be lowercase");
        }
      }
      auto bytes = HexDecode(hex);
      if (!bytes) Fail(fpath + "raw_bytes", "invalid hex string");
      f.raw_bytes = std::move(*bytes);

      const json& insns = Array(fj, "instructions", fpath);
      f.instructions.reserve(insns.size());
      for (size_t j = 0; j < insns.size(); ++j) {
        const std::string ipath =
            fpath + "instructions[" + std::to_string(j) + "].";
        const json& ij = insns[j];
        if (!ij.is_object()) Fail(ipath, "expected object");
        Instruction insn;
        insn.address = Unsigned(ij, "addr", ipath);
        uint64_t size = Unsigned(ij, "size", ipath);
        if (size < 1 || size > UINT32_MAX) Fail(ipath + "size", "must be >= 1");
        insn.size = static_cast<uint32_t>(size);
        insn.mnemonic = String(ij, "mnemonic", ipath);
        if (insn.mnemonic.empty()) Fail(ipath + "mnemonic", "must be non-empty");
        std::transform(insn.mnemonic.begin(), insn.mnemonic.end(),
                       insn.mnemonic.begin(), [](unsigned char c) {
                         return static_cast<char>(std::tolower(c));
                       });
        const json& ops = Array(ij, "operands", ipath);
        for (size_t k = 0; k < ops.size(); ++k) {
          if (!ops[k].is_string()) {
            Fail(ipath + "operands[" + std::to_string(k) + "]",
                 "expected string");
          }
          insn.operands.push_back(ops[k].get<std::string>());
        }
        f.instructions.push_back(std::move(insn));
      }
      sample.functions.push_back(std::move(f));
    }
    std::sort(sample.functions.begin(), sample.functions.end(),
              [](const FunctionRecord& a, const FunctionRecord& b) {
                return a.entry < b.entry;
              });
    try {
      Validate(sample);
    } catch (const InputError& e) {
      throw InputError("line " + std::to_string(line_) + ": " + e.what());
    }
    return sample;
  }

 private:
  size_t line_;
};

}  // namespace

SampleCorpus ParseSampleLine(std::string_view line, size_t line_number) {
  return LineParser(line_number).Parse(line);
}

std::vector<SampleCorpus> ParseCorpus(std::istream& in) {
  std::vector<SampleCorpus> out;
  std::unordered_set<std::string> ids;
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    SampleCorpus sample = ParseSampleLine(line, line_number);
    if (!ids.insert(sample.sample_id).second) {
      throw InputError("line " + std::to_string(line_number) +
                       ": duplicate sample_id '" + sample.sample_id + "'");
    }
    out.push_back(std::move(sample));
  }
  return out;
}

std::vector<SampleCorpus> ParseCorpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open corpus file: " + path.string());
  try {
    return ParseCorpus(in);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::vector<SampleCorpus> ParseCorpora(
    std::span<const std::filesystem::path> paths) {
  std::vector<SampleCorpus> all;
  std::unordered_set<std::string> ids;
  for (const auto& path : paths) {
    for (SampleCorpus& s : ParseCorpus(path)) {
      if (!ids.insert(s.sample_id).second) {
        throw InputError(path.string() + ": duplicate sample_id '" +
                         s.sample_id + "'");
      }
      all.push_back(std::move(s));
    }
  }
  return all;
}

std::string SerializeSample(const SampleCorpus& sample) {
  ordered_json doc;
  doc["sample_id"] = sample.sample_id;
  doc["family"] = sample.family ? ordered_json(*sample.family)
                                : ordered_json(nullptr);
  ordered_json functions = ordered_json::array();
  for (const FunctionRecord& f : sample.functions) {
    ordered_json fj;
    fj["entry"] = f.entry;
    fj["raw_bytes"] = HexEncode(f.raw_bytes);
    ordered_json insns = ordered_json::array();
    for (const Instruction& insn : f.instructions) {
      ordered_json ij;
      ij["addr"] = insn.address;
      ij["size"] = insn.size;
      ij["mnemonic"] = insn.mnemonic;
      ij["operands"] = insn.operands;
      insns.push_back(std::move(ij));
    }
    fj["instructions"] = std::move(insns);
    functions.push_back(std::move(fj));
  }
  doc["functions"] = std::move(functions);
  return doc.dump();
}

std::string SerializeCorpus(std::span<const SampleCorpus> samples) {
  std::string out;
  for (const SampleCorpus& s : samples) {
    out += SerializeSample(s);
    out += '\n';
  }
  return out;
}

std::set<std::string> CollectMnemonics(std::span<const SampleCorpus> samples) {
  std::set<std::string> out;
  for (const SampleCorpus& s : samples) {
    for (const FunctionRecord& f : s.functions) {
      for (const Instruction& insn : f.instructions) out.insert(insn.mnemonic);
    }
  }
  return out;
}

}  // namespace waveline::corpus
