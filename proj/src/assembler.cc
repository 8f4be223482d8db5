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

#include "waveline/assembler.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <optional>

#include "json.hpp"
#include "waveline/error.h"
#include "waveline/toy_isa.h"

namespace waveline::wave {

namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

bool IsIdentifier(std::string_view s) {
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  });
}

std::optional<uint64_t> Number(std::string_view s) {
  int base = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    s.remove_prefix(2);
    base = 16;
  }
  if (s.empty()) return std::nullopt;
  uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::string> SplitOperands(std::string_view s) {
  std::vector<std::string> out;
  s = Trim(s);
  if (s.empty()) return out;
  size_t start = 0;
  while (true) {
    size_t comma = s.find(',', start);
    out.emplace_back(Trim(s.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

struct Statement {
  size_t line = 0;
  uint32_t address = 0;
  std::string op;  // mnemonic, ".byte" or ".word"
  std::vector<std::string> operands;
};

[[noreturn]] void Fail(size_t line, const std::string& msg) {
  throw InputError("line " + std::to_string(line) + ": " + msg);
}

class Resolver {
 public:
  explicit Resolver(const std::map<std::string, uint32_t>& labels)
      : labels_(labels) {}

  uint64_t Value(std::string_view tok, size_t line) const {
    if (auto n = Number(tok)) return *n;
    auto it = labels_.find(std::string(tok));
    if (it == labels_.end()) {
      if (IsIdentifier(tok)) Fail(line, "unresolved label '" + std::string(tok) + "'");
      Fail(line, "bad operand '" + std::string(tok) + "'");
    }
    return it->second;
  }

  std::string Canonical(std::string_view tok, size_t line) const {
    const std::string low = Lower(tok);
    if (low == "sp") return "r" + std::to_string(kStackPointer);
    if (low.size() == 2 && low[0] == 'r' && std::isdigit(static_cast<unsigned char>(low[1]))) {
      return low;
    }
    if (!tok.empty() && tok[0] == '#') {
      uint64_t v = Value(Trim(tok.substr(1)), line);
      if (v > 0xFFFF) Fail(line, "immediate out of range '" + std::string(tok) + "'");
      return "#" + std::to_string(v);
    }
    if (tok.size() >= 2 && tok.front() == '[' && tok.back() == ']') {
      return "[" + Canonical(Trim(tok.substr(1, tok.size() - 2)), line) + "]";
    }
    uint64_t v = Value(tok, line);
    if (v > kAddressMask) Fail(line, "address out of range '" + std::string(tok) + "'");
    return AddressToken(static_cast<uint32_t>(v));
  }

 private:
  const std::map<std::string, uint32_t>& labels_;
};

size_t DataSize(const Statement& st) {
  size_t raw = st.operands.size() * (st.op == ".word" ? 2 : 1);
  return (raw + kInsnSize - 1) / kInsnSize * kInsnSize;
}

}  // namespace

ToyProgram Assemble(std::string_view source) {
  std::vector<Statement> statements;
  std::map<std::string, uint32_t> labels;
  std::optional<std::pair<std::string, size_t>> entry_token;
  std::vector<std::pair<std::string, size_t>> func_tokens;
  uint32_t base = 0;
  uint64_t cursor = 0;
  bool org_seen = false;

  size_t line_no = 0;
  size_t pos = 0;
  while (pos <= source.size()) {
    size_t nl = source.find('\n', pos);
    std::string_view line =
        source.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? source.size() + 1 : nl + 1;
    ++line_no;

    if (size_t semi = line.find(';'); semi != std::string_view::npos) {
      line = line.substr(0, semi);
    }
    line = Trim(line);
    while (true) {
      size_t colon = line.find(':');
      if (colon == std::string_view::npos) break;
      std::string_view name = Trim(line.substr(0, colon));
      if (!IsIdentifier(name)) break;
      if (!labels.emplace(std::string(name), static_cast<uint32_t>(base + cursor)).second) {
        Fail(line_no, "duplicate label '" + std::string(name) + "'");
      }
      line = Trim(line.substr(colon + 1));
    }
    if (line.empty()) continue;

    size_t space = line.find_first_of(" \t");
    std::string op = Lower(line.substr(0, space));
    std::string_view rest =
        space == std::string_view::npos ? std::string_view() : line.substr(space);

    if (op == ".org") {
      if (org_seen || cursor != 0 || !labels.empty()) {
        Fail(line_no, ".org must precede all code and labels");
      }
      auto v = Number(Trim(rest));
      if (!v || *v % kInsnSize != 0 || *v >= kStackStart) {
        Fail(line_no, "bad .org address");
      }
      base = static_cast<uint32_t>(*v);
      org_seen = true;
      continue;
    }
    if (op == ".entry") {
      if (entry_token) Fail(line_no, "duplicate .entry");
      entry_token.emplace(std::string(Trim(rest)), line_no);
      continue;
    }
    if (op == ".func") {
      func_tokens.emplace_back(std::string(Trim(rest)), line_no);
      continue;
    }

    Statement st{line_no, static_cast<uint32_t>(base + cursor), op,
                 SplitOperands(rest)};
    if (op == ".byte" || op == ".word") {
      if (st.operands.empty()) Fail(line_no, op + " needs at least one value");
      cursor += DataSize(st);
    } else {
      const auto& known = Mnemonics();
      if (!std::binary_search(known.begin(), known.end(), op)) {
        Fail(line_no, "unknown mnemonic '" + op + "'");
      }
      cursor += kInsnSize;
    }
    if (base + cursor > kStackStart) {
      Fail(line_no, "image overflow: code reaches the stack region");
    }
    statements.push_back(std::move(st));
  }

  ToyProgram program;
  program.base = base;
  program.image.reserve(cursor);
  Resolver resolver(labels);
  for (const Statement& st : statements) {
    if (st.op == ".byte" || st.op == ".word") {
      const uint64_t limit = st.op == ".byte" ? 0xFF : 0xFFFF;
      for (const std::string& tok : st.operands) {
        uint64_t v = resolver.Value(tok, st.line);
        if (v > limit) Fail(st.line, "data value out of range '" + tok + "'");
        program.image.push_back(static_cast<uint8_t>(v));
        if (st.op == ".word") program.image.push_back(static_cast<uint8_t>(v >> 8));
      }
      while (program.image.size() % kInsnSize != 0) program.image.push_back(0);
      continue;
    }
    std::vector<std::string> canonical;
    for (const std::string& tok : st.operands) {
      if (tok.empty()) Fail(st.line, "empty operand");
      canonical.push_back(resolver.Canonical(tok, st.line));
    }
    InsnBytes insn;
    try {
      insn = Encode(st.op, canonical);
    } catch (const InputError& e) {
      Fail(st.line, e.what());
    }
    program.image.insert(program.image.end(), insn.begin(), insn.end());
  }

  program.entry = entry_token
                      ? static_cast<uint32_t>(resolver.Value(entry_token->first,
                                                             entry_token->second))
                      : base;
  for (const auto& [tok, line] : func_tokens) {
    program.function_table.push_back(static_cast<uint32_t>(resolver.Value(tok, line)));
  }
  std::sort(program.function_table.begin(), program.function_table.end());
  program.function_table.erase(
      std::unique(program.function_table.begin(), program.function_table.end()),
      program.function_table.end());
  Validate(program);
  return program;
}

void Validate(const ToyProgram& p) {
  if (p.base % kInsnSize != 0) throw InputError("program base is not 4-aligned");
  if (p.image.size() % kInsnSize != 0) {
    throw InputError("program image size is not a multiple of 4");
  }
  if (p.end() > kStackStart) {
    throw InputError("image overflow: program reaches the stack region");
  }
  auto inside = [&](uint32_t a) {
    return a >= p.base && a < p.end() && (a - p.base) % kInsnSize == 0;
  };
  if (!inside(p.entry)) throw InputError("entry " + AddressToken(p.entry) + " is outside the image");
  for (uint32_t f : p.function_table) {
    if (!inside(f)) throw InputError("function " + AddressToken(f) + " is outside the image");
  }
}

std::string ProgramToJson(const ToyProgram& p) {
  nlohmann::ordered_json j;
  j["base"] = p.base;
  j["entry"] = p.entry;
  j["image"] = HexEncode(p.image);
  j["functions"] = p.function_table;
  return j.dump(2) + "\n";
}

ToyProgram ProgramFromJson(std::string_view text) {
  ToyProgram p;
  try {
    auto j = nlohmann::json::parse(text);
    p.base = j.at("base").get<uint32_t>();
    p.entry = j.at("entry").get<uint32_t>();
    auto image = HexDecode(j.at("image").get<std::string>());
    if (!image) throw InputError("program field 'image': not valid hex");
    p.image = std::move(*image);
    if (j.contains("functions")) {
      p.function_table = j.at("functions").get<std::vector<uint32_t>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("program json: ") + e.what());
  }
  Validate(p);
  return p;
}

}  // namespace waveline::wave
