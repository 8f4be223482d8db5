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

#include "waveline/synthgen.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "waveline/error.h"
#include "waveline/hashing.h"
#include "waveline/toy_isa.h"

namespace waveline::synth {

using corpus::FunctionRecord;
using corpus::Instruction;
using corpus::SampleCorpus;

std::optional<Model> ParseModel(std::string_view name) {
  if (name == "straight") return Model::kStraight;
  if (name == "klines") return Model::kKLines;
  if (name == "dag") return Model::kDag;
  return std::nullopt;
}

std::string_view ModelName(Model model) {
  switch (model) {
    case Model::kStraight:
      return "straight";
    case Model::kKLines:
      return "klines";
    case Model::kDag:
      return "dag";
  }
  return "?";
}

void ValidateSpec(const HistorySpec& spec) {
  if (spec.n_versions < 1) throw UsageError("n_versions must be at least 1");
  const MutationMix& m = spec.mix;
  if (m.add < 0 || m.remove < 0 || m.update < 0 ||
      std::abs(m.add + m.remove + m.update - 1.0) > 1e-9) {
    throw UsageError("mutation mix probabilities must be non-negative and sum to 1");
  }
  if (!(spec.growth_bias > 0)) throw UsageError("growth bias must be positive");
  if (spec.min_variants < 1 || spec.max_variants < spec.min_variants) {
    throw UsageError("variants per version must satisfy 1 <= min <= max");
  }
  if (spec.model == Model::kKLines &&
      (spec.lines < 1 || spec.lines > spec.n_versions)) {
    throw UsageError("klines needs 1 <= lines <= versions");
  }
  if (spec.model == Model::kDag) {
    if (spec.n_versions < 4) throw UsageError("dag needs at least 4 versions");
    if (spec.merges < 1) throw UsageError("dag needs at least one merge");
    if (spec.n_versions < 1 + 3 * spec.merges) {
      throw UsageError("dag with " + std::to_string(spec.merges) +
                       " merges needs at least " +
                       std::to_string(1 + 3 * spec.merges) + " versions");
    }
  }
}

std::vector<int64_t> RootScores(const std::vector<std::vector<int>>& sets) {
  const size_t k = sets.size();
  std::vector<int64_t> score(k, 0);
  for (size_t v = 0; v < k; ++v) {
    int64_t s = static_cast<int64_t>(k - 1) * static_cast<int64_t>(sets[v].size());
    for (size_t u = 0; u < k; ++u) {
      if (u == v) continue;
      std::vector<int> sym;
      std::set_symmetric_difference(sets[v].begin(), sets[v].end(),
                                    sets[u].begin(), sets[u].end(),
                                    std::back_inserter(sym));
      s += static_cast<int64_t>(sym.size());
    }
    score[v] = s;
  }
  return score;
}

namespace {

constexpr uint64_t kLayoutBase = 0x1000;
constexpr uint64_t kFunctionGap = 16;
constexpr size_t kMinRemovable = 2;
constexpr int kMaxAttempts = 500;

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  int Uniform(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }
  double Real() { return std::uniform_real_distribution<double>(0, 1)(engine_); }
  uint64_t Next() { return engine_(); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

std::string Reg(int r) { return "r" + std::to_string(r); }

std::vector<std::string> RandomOperands(std::string_view m, Rng& rng) {
  auto reg_pair = [&] {
    int a = rng.Uniform(0, 6);
    int b = rng.Uniform(0, 5);
    if (b >= a) ++b;
    return std::pair{a, b};
  };
  auto addr = [&] {
    return wave::AddressToken(static_cast<uint32_t>(rng.Uniform(0x100, 0xEFF) * 4));
  };
  if (m == "mov" || m == "add" || m == "sub" || m == "xor" || m == "cmp") {
    auto [a, b] = reg_pair();
    if (rng.Uniform(0, 1) == 0) return {Reg(a), Reg(b)};
    return {Reg(a), "#" + std::to_string(rng.Uniform(0, 999))};
  }
  if (m == "jmp" || m == "jz" || m == "call") return {addr()};
  if (m == "push" || m == "pop") return {Reg(rng.Uniform(0, 6))};
  if (m == "load") {
    auto [a, b] = reg_pair();
    if (rng.Uniform(0, 1) == 0) return {Reg(a), "[" + Reg(b) + "]"};
    return {Reg(a), "[" + addr() + "]"};
  }
  if (m == "store") {
    auto [a, b] = reg_pair();
    if (rng.Uniform(0, 1) == 0) return {"[" + Reg(a) + "]", Reg(b)};
    return {"[" + addr() + "]", Reg(b)};
  }
  return {};
}

// Functions unique by mnemonic multiset.
class FunctionPool {
 public:
  int Fresh(Rng& rng) {
    static const std::vector<std::string> kMnemonics = [] {
      std::vector<std::string> out;
      for (const std::string& m : wave::Mnemonics()) {
        if (m != "nop" && m != "hlt") out.push_back(m);
      }
      return out;
    }();
    while (true) {
      const int len = rng.Uniform(3, 40);
      std::vector<Instruction> insns;
      std::vector<std::string> key;
      for (int i = 0; i < len; ++i) {
        const std::string& m =
            kMnemonics[rng.Uniform(0, static_cast<int>(kMnemonics.size()) - 1)];
        insns.push_back(Instruction{m, RandomOperands(m, rng), 0, wave::kInsnSize});
        key.push_back(m);
      }
      std::sort(key.begin(), key.end());
      std::string joined;
      for (const auto& k : key) joined += k + ",";
      if (!keys_.insert(joined).second) continue;
      functions_.push_back(std::move(insns));
      return static_cast<int>(functions_.size()) - 1;
    }
  }

  const std::vector<Instruction>& Get(int id) const { return functions_[id]; }

 private:
  std::vector<std::vector<Instruction>> functions_;
  std::set<std::string> keys_;
};

struct Version {
  std::vector<int> functions;  // sorted
  std::vector<int> removable;  // sorted base functions still eligible
};

struct TruthEdge {
  int src;
  int dst;
  lineage::EdgeKind kind;
};

struct Structure {
  std::vector<Version> versions;
  std::vector<TruthEdge> edges;
};

std::vector<int> Minus(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

std::vector<int> Union(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<int> Sample(const std::vector<int>& from, size_t count, Rng& rng) {
  std::vector<int> out;
  std::sample(from.begin(), from.end(), std::back_inserter(out), count,
              rng.engine());
  return out;
}

std::vector<int> FreshSet(FunctionPool& pool, Rng& rng, int count) {
  std::vector<int> out;
  for (int i = 0; i < count; ++i) out.push_back(pool.Fresh(rng));
  std::sort(out.begin(), out.end());
  return out;
}

Version BaseVersion(FunctionPool& pool, Rng& rng, int size) {
  Version v;
  v.functions = FreshSet(pool, rng, size);
  v.removable = v.functions;
  return v;
}

// Keeps v_1 the strict root of a straight line of `length` versions. For
// such a line, score(v_m) - score(v_1) sums a_s (2s - 1) - r_s (2k - 1 - 2s)
// over steps s < m, so every prefix of that sum must stay positive.
struct RootBudget {
  int64_t length = 0;
  int64_t step = 0;  // 1-based index of the next step
  int64_t prefix = 0;

  bool Allows(int64_t adds, int64_t removes) const {
    return prefix + adds * (2 * step - 1) - removes * (2 * length - 1 - 2 * step) > 0;
  }
  void Commit(int64_t adds, int64_t removes) {
    prefix += adds * (2 * step - 1) - removes * (2 * length - 1 - 2 * step);
    ++step;
  }
};

enum class Op { kAdd, kRemove, kUpdate };

// One straight mutation step. `reserve` removable functions are left alone.
Version Step(const Version& parent, const HistorySpec& spec, FunctionPool& pool,
             Rng& rng, RootBudget* budget, size_t reserve) {
  std::vector<Op> ops{Op::kAdd};
  const int extras = rng.Uniform(1, 5);
  const double wa = spec.mix.add * spec.growth_bias;
  const double total = wa + spec.mix.remove + spec.mix.update;
  for (int i = 0; i < extras; ++i) {
    double x = rng.Real() * total;
    ops.push_back(x < wa                     ? Op::kAdd
                  : x < wa + spec.mix.remove ? Op::kRemove
                                             : Op::kUpdate);
  }
  auto count = [&](int64_t& adds, int64_t& removes) {
    adds = removes = 0;
    for (Op op : ops) {
      if (op != Op::kRemove) ++adds;
      if (op != Op::kAdd) ++removes;
    }
  };
  int64_t adds = 0, removes = 0;
  count(adds, removes);
  auto demote_one = [&] {
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
      if (*it != Op::kAdd) {
        *it = Op::kAdd;
        return;
      }
    }
  };
  while (removes > 0 &&
         (parent.removable.size() < reserve + kMinRemovable + static_cast<size_t>(removes) ||
          (budget && !budget->Allows(adds, removes)))) {
    demote_one();
    count(adds, removes);
  }
  if (budget) budget->Commit(adds, removes);

  std::vector<int> gone = Sample(parent.removable, static_cast<size_t>(removes), rng);
  std::sort(gone.begin(), gone.end());
  Version child;
  child.functions = Union(Minus(parent.functions, gone),
                          FreshSet(pool, rng, static_cast<int>(adds)));
  child.removable = Minus(parent.removable, gone);
  return child;
}

void Line(Structure& s, int length, const HistorySpec& spec, FunctionPool& pool,
          Rng& rng) {
  RootBudget budget{length, 1, 0};
  s.versions.push_back(BaseVersion(pool, rng, length + rng.Uniform(10, 20)));
  for (int i = 1; i < length; ++i) {
    const int parent = static_cast<int>(s.versions.size()) - 1;
    s.versions.push_back(Step(s.versions[parent], spec, pool, rng, &budget, 0));
    s.edges.push_back({parent, parent + 1, lineage::EdgeKind::kTree});
  }
}

// Worst-case removable functions one diamond consumes.
constexpr size_t kDiamondReserve = 24;
constexpr int kMaxBranchAdds = 12;

struct DiamondShape {
  int rt, rb, ab, at, rm, am;
};

// |R_t| < |R_b| < |R_m| orders the fork's children t, b and then m in
// Phase II. |A_b| + |R_t| > 3 makes b's contribution to m detectable while
// |A_b| <= 3 keeps b itself free of cross-edges. |A_t| > |R_t| and
// |t| > |b| make t, not p or b, the tree parent of m. |A_t| and |A_m| are
// then raised until the trunk p -> t -> m, seen as two straight steps,
// keeps the first version the root.
DiamondShape DrawShape(RootBudget budget, Rng& rng) {
  DiamondShape d;
  d.rt = rng.Uniform(1, 2);
  d.rb = rng.Uniform(d.rt + 1, d.rt + 2);
  d.ab = rng.Uniform(std::max(0, 4 - d.rt), 3);
  d.at = std::max({1, d.rt + 1, d.rt + d.ab - d.rb + 1}) + rng.Uniform(0, 2);
  while (!budget.Allows(d.at, d.rt)) ++d.at;
  d.rm = std::max(d.rb, d.rb - d.rt + d.at) + 1 + rng.Uniform(0, 1);
  d.am = rng.Uniform(0, 2);
  budget.Commit(d.at, d.rt);
  while (!budget.Allows(d.ab + d.rt + d.am, d.rm)) ++d.am;
  return d;
}

// Fork p into trunk t and branch b, then merge both into m.
bool Diamond(Structure& s, int p, const DiamondShape& d, FunctionPool& pool,
             Rng& rng) {
  const Version& parent = s.versions[p];
  if (parent.removable.size() <
      static_cast<size_t>(d.rt + d.rb + d.rm) + kMinRemovable) {
    return false;
  }
  std::vector<int> pick =
      Sample(parent.removable, static_cast<size_t>(d.rt + d.rb + d.rm), rng);
  std::shuffle(pick.begin(), pick.end(), rng.engine());
  auto slice = [&](int from, int count) {
    std::vector<int> out(pick.begin() + from, pick.begin() + from + count);
    std::sort(out.begin(), out.end());
    return out;
  };
  const std::vector<int> r_t = slice(0, d.rt);
  const std::vector<int> r_b = slice(d.rt, d.rb);
  const std::vector<int> r_m = slice(d.rt + d.rb, d.rm);

  Version t, b, m;
  t.functions = Union(Minus(parent.functions, r_t), FreshSet(pool, rng, d.at));
  t.removable = Minus(parent.removable, r_t);
  b.functions = Union(Minus(parent.functions, r_b), FreshSet(pool, rng, d.ab));
  b.removable = Minus(parent.removable, r_b);
  m.functions = Union(Minus(Union(t.functions, b.functions), r_m),
                      FreshSet(pool, rng, d.am));
  m.removable = Minus(Minus(Minus(parent.removable, r_t), r_b), r_m);

  const int ti = static_cast<int>(s.versions.size());
  s.versions.push_back(std::move(t));
  s.versions.push_back(std::move(b));
  s.versions.push_back(std::move(m));
  s.edges.push_back({p, ti, lineage::EdgeKind::kTree});
  s.edges.push_back({p, ti + 1, lineage::EdgeKind::kTree});
  s.edges.push_back({ti, ti + 2, lineage::EdgeKind::kTree});
  s.edges.push_back({ti + 1, ti + 2, lineage::EdgeKind::kCross});
  return true;
}

std::vector<int> Composition(int total, int parts, int min_part, Rng& rng) {
  std::vector<int> out(parts, min_part);
  for (int i = 0; i < total - parts * min_part; ++i) {
    out[rng.Uniform(0, parts - 1)]++;
  }
  return out;
}

std::optional<Structure> Dag(const HistorySpec& spec, FunctionPool& pool,
                             Rng& rng) {
  Structure s;
  s.versions.push_back(BaseVersion(
      pool, rng,
      spec.n_versions + static_cast<int>(kDiamondReserve) * spec.merges +
          rng.Uniform(10, 20)));
  RootBudget budget{spec.n_versions, 1, 0};
  int tip = 0;
  int left = spec.n_versions - 1;
  int merges = spec.merges;
  while (left > 0) {
    if (merges > 0) {
      const DiamondShape d = DrawShape(budget, rng);
      const bool forced = left == 3 * merges;
      const bool wanted = rng.Uniform(1, left - 3 * merges + merges) <= merges;
      if (forced || (wanted && d.at <= kMaxBranchAdds && d.am <= kMaxBranchAdds)) {
        budget.Commit(d.at, d.rt);
        budget.Commit(d.ab + d.rt + d.am, d.rm);
        if (!Diamond(s, tip, d, pool, rng)) return std::nullopt;
        tip = static_cast<int>(s.versions.size()) - 1;
        left -= 3;
        --merges;
        continue;
      }
    }
    const size_t reserve = kDiamondReserve * static_cast<size_t>(merges);
    s.versions.push_back(Step(s.versions[tip], spec, pool, rng, &budget, reserve));
    const int child = static_cast<int>(s.versions.size()) - 1;
    s.edges.push_back({tip, child, lineage::EdgeKind::kTree});
    tip = child;
    --left;
  }
  return s;
}

bool FirstIsStrictRoot(const Structure& s) {
  std::vector<std::vector<int>> sets;
  for (const Version& v : s.versions) sets.push_back(v.functions);
  std::vector<int64_t> score = RootScores(sets);
  for (size_t i = 1; i < score.size(); ++i) {
    if (score[i] <= score[0]) return false;
  }
  return true;
}

SampleCorpus Layout(std::string sample_id,
                    const std::vector<std::vector<Instruction>>& functions) {
  SampleCorpus out;
  out.sample_id = std::move(sample_id);
  out.family = "synth";
  uint64_t at = kLayoutBase;
  for (const auto& insns : functions) {
    FunctionRecord f;
    f.entry = at;
    for (Instruction insn : insns) {
      insn.address = at;
      insn.size = wave::kInsnSize;
      wave::InsnBytes bytes = wave::Encode(insn.mnemonic, insn.operands);
      f.raw_bytes.insert(f.raw_bytes.end(), bytes.begin(), bytes.end());
      f.instructions.push_back(std::move(insn));
      at += wave::kInsnSize;
    }
    at += kFunctionGap;
    out.functions.push_back(std::move(f));
  }
  return out;
}

}  // namespace

corpus::SampleCorpus VariantOf(const corpus::SampleCorpus& sample,
                               uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<Instruction>> functions;
  for (const FunctionRecord& f : sample.functions) {
    std::vector<Instruction> insns = f.instructions;
    const int pads = rng.Uniform(1, 3);
    for (int i = 0; i < pads; ++i) {
      Instruction pad;
      if (rng.Uniform(0, 1) == 0) {
        pad.mnemonic = "nop";
      } else {
        const std::string r = Reg(rng.Uniform(0, 6));
        pad.mnemonic = "mov";
        pad.operands = {r, r};
      }
      insns.insert(insns.begin() + rng.Uniform(0, static_cast<int>(insns.size())),
                   std::move(pad));
    }
    std::shuffle(insns.begin(), insns.end(), rng.engine());
    functions.push_back(std::move(insns));
  }
  std::shuffle(functions.begin(), functions.end(), rng.engine());
  SampleCorpus out = Layout(sample.sample_id, functions);
  out.family = sample.family;
  return out;
}

SyntheticHistory Generate(const HistorySpec& spec) {
  ValidateSpec(spec);
  Rng rng(spec.seed);
  FunctionPool pool;
  Structure s;
  switch (spec.model) {
    case Model::kStraight:
      Line(s, spec.n_versions, spec, pool, rng);
      break;
    case Model::kKLines:
      for (int len : Composition(spec.n_versions, spec.lines, 1, rng)) {
        Line(s, len, spec, pool, rng);
      }
      break;
    case Model::kDag:
      for (int attempt = 0;; ++attempt) {
        if (attempt == kMaxAttempts) {
          throw UsageError(
              "could not generate a dag history with an unambiguous root; "
              "try another seed");
        }
        auto dag = Dag(spec, pool, rng);
        if (dag && FirstIsStrictRoot(*dag)) {
          s = std::move(*dag);
          break;
        }
      }
      break;
  }
  if (spec.model == Model::kStraight && !FirstIsStrictRoot(s)) {
    throw InvariantError("straight history lost its root");
  }

  // Render every version, then derive hashes with the corpus-wide table.
  SyntheticHistory h;
  const int n = static_cast<int>(s.versions.size());
  std::vector<std::vector<std::string>> members(n);
  for (int v = 0; v < n; ++v) {
    std::vector<std::vector<Instruction>> functions;
    for (int id : s.versions[v].functions) functions.push_back(pool.Get(id));
    SampleCorpus canonical = Layout("synth-" + std::to_string(v), functions);
    const int variants = rng.Uniform(spec.min_variants, spec.max_variants);
    for (int j = 0; j < variants; ++j) {
      SampleCorpus sample = VariantOf(canonical, rng.Next());
      sample.sample_id = "synth-" + std::to_string(v) + "-" + std::to_string(j);
      h.provenance[sample.sample_id] = v;
      members[v].push_back(sample.sample_id);
      h.corpora.push_back(std::move(sample));
    }
  }

  const auto table = hashing::PrimeTable::Build(corpus::CollectMnemonics(h.corpora));
  const corpus::PaddingConfig padding;
  size_t next_sample = 0;
  for (int v = 0; v < n; ++v) {
    const hashing::HashedSample hashed = hashing::HashSample(
        h.corpora[next_sample], hashing::HashKind::kSpp, table, padding);
    next_sample += members[v].size();
    lineage::VersionNode node;
    node.id = v;
    node.program_hash = hashed.program;
    node.instruction_counts = hashed.instruction_counts;
    node.members = members[v];
    std::sort(node.members.begin(), node.members.end());
    h.truth.nodes.push_back(std::move(node));
    h.truth.insertion_order.push_back(v);
  }
  std::vector<int> tree_parent(n, -1);
  for (const TruthEdge& e : s.edges) {
    if (e.kind == lineage::EdgeKind::kTree) tree_parent[e.dst] = e.src;
  }
  for (const TruthEdge& e : s.edges) {
    const auto& dst = s.versions[e.dst].functions;
    std::vector<int> basis = dst;
    if (e.kind == lineage::EdgeKind::kCross) {
      basis = Minus(dst, s.versions[tree_parent[e.dst]].functions);
    }
    std::vector<int> shared;
    std::set_intersection(basis.begin(), basis.end(),
                          s.versions[e.src].functions.begin(),
                          s.versions[e.src].functions.end(),
                          std::back_inserter(shared));
    h.truth.edges.push_back(lineage::Edge{e.src, e.dst, shared.size(), e.kind});
  }
  return h;
}

}  // namespace waveline::synth
