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

#include "waveline/cli.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "waveline/assembler.h"
#include "waveline/corpus.h"
#include "waveline/error.h"
#include "waveline/hashing.h"
#include "waveline/lineage.h"
#include "waveline/loader.h"
#include "waveline/metrics.h"
#include "waveline/packer.h"
#include "waveline/reconstruct.h"
#include "waveline/synthgen.h"
#include "waveline/vm.h"
#include "waveline/wave_io.h"

namespace waveline::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::vector<std::string> inputs;
  std::string hash = "spp";
  std::string dot_out;
  std::string json_out;
  std::string out;
  std::string prime_table;
  std::string prime_table_out;
  size_t cross_threshold = lineage::kDefaultCrossThreshold;
  double fallback_similarity = lineage::kDefaultFallbackSimilarity;

  std::string original;
  std::string unpacked;
  std::string truth;
  std::string inferred;
  bool precision = false;

  std::string model = "straight";
  int versions = 10;
  int variants = 1;
  int lines = 2;
  int merges = 1;
  uint64_t seed = 0;

  std::string input;
  std::string run_dir;
  std::optional<int> layers;
  std::vector<int> keys;
  uint64_t max_steps = 1'000'000;
  std::string filter = "exec-only";
  std::string sample_id;
};

class Session {
 public:
  Session(const Options& o, std::ostream& out, std::ostream& err)
      : o_(o), out_(out), err_(err) {}

  void Progress(const std::string& msg) { err_ << "waveline: " << msg << "\n"; }

  void Emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
      out_ << content;
    } else {
      WriteFile(path, content);
      Progress("wrote " + path);
    }
  }

  std::vector<corpus::SampleCorpus> Corpora(const std::vector<std::string>& paths) {
    std::vector<fs::path> ps(paths.begin(), paths.end());
    auto samples = corpus::ParseCorpora(ps);
    Progress("read " + std::to_string(samples.size()) + " samples from " +
             std::to_string(paths.size()) + " file(s)");
    return samples;
  }

  hashing::PrimeTable Table(std::span<const corpus::SampleCorpus> samples) {
    hashing::PrimeTable table =
        o_.prime_table.empty()
            ? hashing::PrimeTable::Build(corpus::CollectMnemonics(samples))
            : hashing::PrimeTable::FromJson(ReadFile(o_.prime_table));
    if (!o_.prime_table_out.empty()) {
      WriteFile(o_.prime_table_out, table.ToJson());
      Progress("wrote " + o_.prime_table_out);
    }
    return table;
  }

  void Lineage() {
    auto kind = hashing::ParseHashKind(o_.hash);
    if (!kind) throw UsageError("--hash must be raw or spp");
    if (!(o_.fallback_similarity > 0) || o_.fallback_similarity > 1) {
      throw UsageError("--fallback-sim must be in (0, 1]");
    }
    if (o_.cross_threshold < 1) throw UsageError("--cross-threshold must be positive");
    auto samples = Corpora(o_.inputs);
    auto table = Table(samples);
    auto versions = lineage::IdentifyVersions(samples, *kind, table, {});
    Progress("identified " + std::to_string(versions.size()) + " versions");
    auto graph = lineage::InferLineage(
        std::move(versions),
        lineage::InferOptions{o_.cross_threshold, o_.fallback_similarity});
    size_t cross = std::count_if(graph.edges.begin(), graph.edges.end(), [](const auto& e) {
      return e.kind == lineage::EdgeKind::kCross;
    });
    Progress("lineage graph: " + std::to_string(graph.edges.size()) + " edges, " +
             std::to_string(cross) + " cross-edges");
    if (o_.dot_out.empty() && o_.json_out.empty()) {
      out_ << lineage::ExportDot(graph);
      return;
    }
    if (!o_.dot_out.empty()) Emit(o_.dot_out, lineage::ExportDot(graph));
    if (!o_.json_out.empty()) Emit(o_.json_out, lineage::ExportJson(graph));
  }

  void Hash() {
    auto samples = Corpora(o_.inputs);
    auto table = Table(samples);
    Emit(o_.out, hashing::HashDumpCsv(samples, table, {}));
  }

  void FcFnr() {
    auto original = Corpora({o_.original});
    auto unpacked = Corpora({o_.unpacked});
    std::vector<corpus::SampleCorpus> all = original;
    all.insert(all.end(), unpacked.begin(), unpacked.end());
    auto table = Table(all);
    std::map<std::string, const corpus::SampleCorpus*> by_id;
    for (const auto& s : original) by_id[s.sample_id] = &s;
    std::ostringstream csv;
    csv << "sample_id,fc,fnr\n";
    for (const auto& u : unpacked) {
      const corpus::SampleCorpus* o = nullptr;
      if (original.size() == 1) {
        o = &original.front();
      } else if (auto it = by_id.find(u.sample_id); it != by_id.end()) {
        o = it->second;
      } else {
        throw InputError("no original sample for '" + u.sample_id + "'");
      }
      metrics::FunctionSetPair pair{metrics::SppFunctionSet(*o, table, {}),
                                    metrics::SppFunctionSet(u, table, {})};
      csv << u.sample_id << "," << Fixed(metrics::FunctionCoverage(pair).value())
          << "," << Fixed(metrics::FunctionNoiseRatio(pair).value()) << "\n";
    }
    Emit(o_.out, csv.str());
  }

  void Po() {
    metrics::OrderedGraphPair pair{lineage::ParseGraphTopology(ReadFile(o_.truth)),
                                   lineage::ParseGraphTopology(ReadFile(o_.inferred))};
    metrics::Ratio r = o_.precision ? metrics::PoPrecision(pair) : metrics::PoAgreement(pair);
    Progress(std::to_string(r.numerator) + "/" + std::to_string(r.denominator) +
             " ancestor pairs agree");
    Emit(o_.out, Fixed(r.value()) + "\n");
  }

  void Synth() {
    auto model = synth::ParseModel(o_.model);
    if (!model) throw UsageError("--model must be straight, klines or dag");
    synth::HistorySpec spec;
    spec.model = *model;
    spec.n_versions = o_.versions;
    spec.min_variants = spec.max_variants = o_.variants;
    spec.lines = o_.lines;
    spec.merges = o_.merges;
    spec.seed = o_.seed;
    auto h = synth::Generate(spec);
    Progress("generated " + std::to_string(h.truth.nodes.size()) + " versions, " +
             std::to_string(h.corpora.size()) + " samples");
    Emit(o_.out, corpus::SerializeCorpus(h.corpora));
    if (!o_.truth.empty()) Emit(o_.truth, lineage::ExportJson(h.truth, &h.provenance));
  }

  void Assemble() {
    auto program = wave::Assemble(ReadFile(o_.input));
    Emit(o_.out, wave::ProgramToJson(program));
  }

  void Pack() {
    auto program = wave::ProgramFromJson(ReadFile(o_.input));
    std::vector<uint8_t> keys;
    if (!o_.keys.empty()) {
      if (o_.layers && static_cast<int>(o_.keys.size()) != *o_.layers) {
        throw UsageError("--keys needs one key per layer");
      }
      for (int k : o_.keys) {
        if (k < 1 || k > 255) throw UsageError("layer keys must be in 1..255");
        keys.push_back(static_cast<uint8_t>(k));
      }
    } else {
      keys = wave::KeysFromSeed(o_.seed, o_.layers.value_or(1));
    }
    auto packed = wave::Pack(program, keys);
    Progress("packed with " + std::to_string(keys.size()) + " layer(s)");
    Emit(o_.out, wave::ProgramToJson(packed));
  }

  void Run() {
    auto program = wave::ProgramFromJson(ReadFile(o_.input));
    if (o_.out.empty()) throw UsageError("wave run needs --out DIR");
    wave::RunOptions options;
    options.max_steps = o_.max_steps;
    try {
      auto result = wave::RunAndUnpack(program, options);
      wave::WriteRun(o_.out, result, program.entry);
      Progress(std::to_string(result.waves.size()) + " wave(s) in " +
               std::to_string(result.final_state.steps) + " steps, written to " + o_.out);
    } catch (const wave::VmError& e) {
      wave::WriteRun(o_.out, e.partial(), program.entry);
      Progress("partial artifacts written to " + o_.out);
      throw;
    }
  }

  wave::RangeFilter Filter() {
    auto f = wave::ParseRangeFilter(o_.filter);
    if (!f) throw UsageError("--filter must be exec-only or all");
    return *f;
  }

  void Load() {
    const auto filter = Filter();
    auto run = wave::ReadRun(o_.run_dir);
    auto db = wave::LoadRanges(run.waves, filter);
    Progress(std::to_string(db.segments.size()) + " segment(s) loaded");
    Emit(o_.out, wave::DatabaseToJson(db));
  }

  void Reconstruct() {
    const auto filter = Filter();
    auto run = wave::ReadRun(o_.run_dir);
    auto db = wave::LoadRanges(run.waves, filter);
    std::string id = o_.sample_id.empty() ? fs::path(o_.run_dir).filename().string()
                                          : o_.sample_id;
    auto result = wave::Reconstruct(db, run.waves, id);
    for (const auto& d : result.diagnostics) Progress("diagnostic: " + d);
    Progress(std::to_string(result.corpus.functions.size()) + " function(s) from " +
             std::to_string(result.disassembled) + " disassembled instructions");
    Emit(o_.out, corpus::SerializeSample(result.corpus) + "\n");
  }

  void ProgramCorpus() {
    auto program = wave::ProgramFromJson(ReadFile(o_.input));
    std::string id = o_.sample_id.empty() ? fs::path(o_.input).stem().string()
                                          : o_.sample_id;
    Emit(o_.out, corpus::SerializeSample(wave::ProgramCorpus(program, id)) + "\n");
  }

 private:
  static std::string Fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
  }

  const Options& o_;
  std::ostream& out_;
  std::ostream& err_;
};

std::string VersionText() {
  return std::string("waveline ") + kToolVersion + " (corpus format " +
         std::to_string(kFormatVersion) + ", graph format " +
         std::to_string(kFormatVersion) + ", wave format " +
         std::to_string(kFormatVersion) + ")";
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  Options o;
  CLI::App app("Version lineage inference and toy unpacking toolkit", "waveline");
  app.set_version_flag("--version", VersionText());
  app.require_subcommand(1);

  auto* lineage_cmd = app.add_subcommand("lineage", "Infer the lineage graph of corpora");
  lineage_cmd->add_option("--in", o.inputs, "Corpus JSONL file(s)")->required();
  lineage_cmd->add_option("--hash", o.hash, "Function hash: raw or spp")
      ->check(CLI::IsMember({"raw", "spp"}));
  lineage_cmd->add_option("--dot", o.dot_out, "DOT output path");
  lineage_cmd->add_option("--json", o.json_out, "JSON output path");
  lineage_cmd->add_option("--cross-threshold", o.cross_threshold,
                          "Cross-edge threshold t");
  lineage_cmd->add_option("--fallback-sim", o.fallback_similarity,
                          "Fallback Jaccard similarity");
  lineage_cmd->add_option("--prime-table", o.prime_table, "Prime table to use");
  lineage_cmd->add_option("--prime-table-out", o.prime_table_out,
                          "Write the prime table used");

  auto* hash_cmd = app.add_subcommand("hash", "Dump per-sample program hashes");
  hash_cmd->add_option("--in", o.inputs, "Corpus JSONL file(s)")->required();
  hash_cmd->add_option("--out", o.out, "CSV output path");
  hash_cmd->add_option("--prime-table", o.prime_table, "Prime table to use");
  hash_cmd->add_option("--prime-table-out", o.prime_table_out,
                       "Write the prime table used");

  auto* metrics_cmd = app.add_subcommand("metrics", "Unpacking and lineage accuracy");
  metrics_cmd->require_subcommand(1);
  auto* fc_cmd = metrics_cmd->add_subcommand("fc-fnr", "Function coverage and noise");
  fc_cmd->add_option("--original", o.original, "Original corpus")->required();
  fc_cmd->add_option("--unpacked", o.unpacked, "Unpacked corpus")->required();
  fc_cmd->add_option("--out", o.out, "CSV output path");
  fc_cmd->add_option("--prime-table", o.prime_table, "Prime table to use");
  auto* po_cmd = metrics_cmd->add_subcommand("po", "Partial-order agreement");
  po_cmd->add_option("--truth", o.truth, "Ground-truth graph JSON")->required();
  po_cmd->add_option("--inferred", o.inferred, "Inferred graph JSON")->required();
  po_cmd->add_flag("--precision", o.precision, "Report the precision variant");
  po_cmd->add_option("--out", o.out, "Output path");

  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic history");
  synth_cmd->add_option("--model", o.model, "straight, klines or dag")
      ->check(CLI::IsMember({"straight", "klines", "dag"}));
  synth_cmd->add_option("--versions", o.versions, "Number of versions");
  synth_cmd->add_option("--variants", o.variants, "Variants per version");
  synth_cmd->add_option("--lines", o.lines, "Lines for klines");
  synth_cmd->add_option("--merges", o.merges, "Merges for dag");
  synth_cmd->add_option("--seed", o.seed, "RNG seed");
  synth_cmd->add_option("--out", o.out, "Corpus JSONL output path");
  synth_cmd->add_option("--truth", o.truth, "Ground-truth graph JSON path");

  auto* wave_cmd = app.add_subcommand("wave", "Toy packing and wave unpacking");
  wave_cmd->require_subcommand(1);
  auto* asm_cmd = wave_cmd->add_subcommand("assemble", "Assemble toy source");
  asm_cmd->add_option("--in", o.input, "Assembly source")->required();
  asm_cmd->add_option("--out", o.out, "Program JSON output path");
  auto* pack_cmd = wave_cmd->add_subcommand("pack", "Pack a program");
  pack_cmd->add_option("--in", o.input, "Program JSON")->required();
  pack_cmd->add_option("--layers", o.layers, "Packing layers (>= 1)");
  pack_cmd->add_option("--keys", o.keys, "One XOR key per layer, innermost first")
      ->delimiter(',');
  pack_cmd->add_option("--seed", o.seed, "Seed for generated keys");
  pack_cmd->add_option("--out", o.out, "Program JSON output path");
  auto* run_cmd = wave_cmd->add_subcommand("run", "Run and record waves");
  run_cmd->add_option("--in", o.input, "Program JSON")->required();
  run_cmd->add_option("--out", o.out, "Run directory")->required();
  run_cmd->add_option("--max-steps", o.max_steps, "Step budget");
  auto* load_cmd = wave_cmd->add_subcommand("load", "Load waves into a merged database");
  load_cmd->add_option("--run", o.run_dir, "Run directory")->required();
  load_cmd->add_option("--filter", o.filter, "exec-only or all")
      ->check(CLI::IsMember({"exec-only", "all"}));
  load_cmd->add_option("--out", o.out, "Database JSON output path");
  auto* rec_cmd = wave_cmd->add_subcommand("reconstruct", "Rebuild a function corpus");
  rec_cmd->add_option("--run", o.run_dir, "Run directory")->required();
  rec_cmd->add_option("--filter", o.filter, "exec-only or all")
      ->check(CLI::IsMember({"exec-only", "all"}));
  rec_cmd->add_option("--sample-id", o.sample_id, "Sample id of the corpus");
  rec_cmd->add_option("--out", o.out, "Corpus JSONL output path");
  auto* corpus_cmd = wave_cmd->add_subcommand("corpus", "Ground-truth corpus of a program");
  corpus_cmd->add_option("--in", o.input, "Program JSON")->required();
  corpus_cmd->add_option("--sample-id", o.sample_id, "Sample id of the corpus");
  corpus_cmd->add_option("--out", o.out, "Corpus JSONL output path");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << VersionText() << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "waveline: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::kUsage);
  }

  Session s(o, out, err);
  try {
    if (lineage_cmd->parsed()) {
      s.Lineage();
    } else if (hash_cmd->parsed()) {
      s.Hash();
    } else if (fc_cmd->parsed()) {
      s.FcFnr();
    } else if (po_cmd->parsed()) {
      s.Po();
    } else if (synth_cmd->parsed()) {
      s.Synth();
    } else if (asm_cmd->parsed()) {
      s.Assemble();
    } else if (pack_cmd->parsed()) {
      s.Pack();
    } else if (run_cmd->parsed()) {
      s.Run();
    } else if (load_cmd->parsed()) {
      s.Load();
    } else if (rec_cmd->parsed()) {
      s.Reconstruct();
    } else if (corpus_cmd->parsed()) {
      s.ProgramCorpus();
    }
  } catch (const Error& e) {
    err << "waveline: error: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    err << "waveline: internal error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::kInvariant);
  }
  return 0;
}

}  // namespace waveline::cli
