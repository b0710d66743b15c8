//===-- predicator/Features.h - Per-branch code features --------*- C++ -*-===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Static features of an if-conversion candidate. Eleven of them feed the
// neural networks; the remaining aggregates serve the baseline heuristic.
// All quantities are exact rationals measured in cycles unless noted.
//
//===----------------------------------------------------------------------===//

#ifndef PREDICATOR_FEATURES_H
#define PREDICATOR_FEATURES_H

#include "predicator/CFG.h"
#include "predicator/Candidate.h"
#include "predicator/IR.h"
#include "predicator/MachineModel.h"
#include "predicator/Rational.h"

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace predicator {

inline constexpr std::size_t NumFeatures = 11;

inline constexpr std::array<std::string_view, NumFeatures> FeatureNames = {
    "bb_size",   "true_cp",      "false_cp",  "min_cp",
    "unexploited_ilp", "branch_depth", "loop_depth", "slack_sum",
    "max_depth", "true_bb_depth", "false_bb_depth"};

struct FeatureVector {
  Rational BBSize;         ///< Head instructions, terminator included.
  Rational TrueCP;         ///< Critical path of the true side body.
  Rational FalseCP;
  Rational MinCP;
  Rational UnexploitedILP; ///< Total latency / critical path, merged region.
  Rational BranchDepth;    ///< ASAP start of the condition producer.
  Rational LoopDepth;
  Rational SlackSum;       ///< Over the merged region.
  Rational MaxDepth;       ///< ALAP start of the latest select.
  Rational TrueBBDepth;
  Rational FalseBBDepth;

  // Aggregates used by the baseline heuristic; not network inputs.
  Rational MergedCP;
  Rational MergedLatency;
  Rational TrueLatency;
  Rational FalseLatency;
  bool HasTrueSide = false;
  bool HasFalseSide = false;

  std::array<Rational, NumFeatures> values() const {
    return {BBSize,      TrueCP,   FalseCP,  MinCP,    UnexploitedILP,
            BranchDepth, LoopDepth, SlackSum, MaxDepth, TrueBBDepth,
            FalseBBDepth};
  }

  friend bool operator==(const FeatureVector &, const FeatureVector &) = default;
};

using NormalizedVector = std::array<double, NumFeatures>;

/// A straight-line instruction set with operand dependence edges. Deps of a
/// node are indices of the nodes producing its operands.
struct RegionNode {
  Opcode Op = Opcode::Add;
  std::vector<std::size_t> Deps;
};

struct Region {
  std::vector<RegionNode> Nodes;

  /// Builds nodes in order; an operand depends on the latest earlier node
  /// defining that name. Operands defined outside the list are free.
  static Region fromInstructions(const std::vector<Instruction> &Insts);
};

struct RegionSchedule {
  std::vector<std::uint64_t> Asap;
  std::vector<std::uint64_t> Alap;
  std::uint64_t CriticalPath = 0;
};

/// Classic earliest/latest start schedules. Node order need not be
/// topological. Throws InternalError on a dependence cycle.
RegionSchedule scheduleRegion(const Region &R, const LatencyTable &Lat);
std::uint64_t regionCriticalPath(const Region &R, const LatencyTable &Lat);
std::uint64_t slackSum(const Region &R, const LatencyTable &Lat);
std::uint64_t totalLatency(const Region &R, const LatencyTable &Lat);

/// Throws UserError if the candidate is not legal in F.
FeatureVector extractFeatures(const Module &M, const Function &F,
                              const Candidate &C, const MachineModel &MM,
                              const CfgInfo &Cfg);

/// Per-feature min-max scaling over the set; constant features map to 0.
/// Throws UserError on an empty set.
std::vector<NormalizedVector>
normalizeFeatures(const std::vector<FeatureVector> &Vs);

/// Header plus one row per vector, six fractional digits.
std::string featuresCsv(const std::vector<FeatureVector> &Vs, char Sep = ',');

} // namespace predicator

#endif // PREDICATOR_FEATURES_H
