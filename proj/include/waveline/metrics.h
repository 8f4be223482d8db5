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

// Unpacking accuracy (function coverage, function noise ratio) and lineage
// accuracy (partial-order agreement).

#ifndef WAVELINE_METRICS_H_
#define WAVELINE_METRICS_H_

#include <set>
#include <span>

#include "waveline/hashing.h"
#include "waveline/lineage.h"

namespace waveline::metrics {

using FunctionSet = std::set<hashing::FunctionHash>;

// F_o: functions of the original program; F_u: functions recovered from the
// unpacked output. Both SPP hashes of normalized functions.
struct FunctionSetPair {
  FunctionSet original;
  FunctionSet unpacked;
};

// A ratio kept as an exact fraction alongside its value.
struct Ratio {
  size_t numerator = 0;
  size_t denominator = 1;

  double value() const {
    return static_cast<double>(numerator) / static_cast<double>(denominator);
  }
  bool operator==(const Ratio& o) const {
    return numerator * o.denominator == o.numerator * denominator;
  }
};

// |F_u ∩ F_o| / |F_o|. Throws UsageError when F_o is empty.
Ratio FunctionCoverage(const FunctionSetPair& p);
// |F_u \ F_o| / |F_u|. Throws UsageError when F_u is empty.
Ratio FunctionNoiseRatio(const FunctionSetPair& p);

// SPP function-hash set of a sample (short functions excluded).
FunctionSet SppFunctionSet(const corpus::SampleCorpus& sample,
                           const hashing::PrimeTable& table,
                           const corpus::PaddingConfig& padding);

struct OrderedGraphPair {
  lineage::GraphTopology ground_truth;
  lineage::GraphTopology inferred;
};

// Fraction of ground-truth strict-ancestor pairs (a, b) for which a is also
// a strict ancestor of b in the inferred graph, nodes matched by program
// hash. Throws UsageError when the ground truth has no ancestor pair.
Ratio PoAgreement(const OrderedGraphPair& p);

// Companion precision figure: fraction of inferred ancestor pairs between
// matched versions that are ancestor pairs in the ground truth. Throws
// UsageError when there is no such inferred pair.
Ratio PoPrecision(const OrderedGraphPair& p);

}  // namespace waveline::metrics

#endif  // WAVELINE_METRICS_H_
