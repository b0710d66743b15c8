//===-- predicator/IfConversion.h - Bitmask-driven if-conversion -*- C++ -*-===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Triangle/diamond discovery, legality, PHI-to-select conversion, the
// bitmask driver, and the static profitability heuristic used as the
// reference configuration.
//
//===----------------------------------------------------------------------===//

#ifndef PREDICATOR_IFCONVERSION_H
#define PREDICATOR_IFCONVERSION_H

#include "predicator/CFG.h"
#include "predicator/Candidate.h"
#include "predicator/Features.h"
#include "predicator/IR.h"
#include "predicator/MachineModel.h"

#include <string>
#include <utility>
#include <vector>

namespace predicator {

/// Candidates of one function in dominator-tree post-order of their heads
/// (inner before outer). Index and Site are local to the function.
std::vector<Candidate> findCandidates(const Module &M, const Function &F,
                                      const CfgInfo &Cfg);

/// Candidates of every function, concatenated in function order, with
/// module-wide Index and Site numbering.
std::vector<Candidate> findModuleCandidates(const Module &M);

/// Legality of the br at local branch site `Site` of F. Throws UserError for
/// an unknown site.
Legality checkLegality(const Module &M, const Function &F, std::size_t Site);

/// Legality of the br terminating block `Head`. When legal and `Match` is
/// non-null, fills in the region description (Index/Site untouched).
Legality checkLegalityAt(const Module &M, const Function &F,
                         const CfgInfo &Cfg, std::size_t Head,
                         Candidate *Match = nullptr);

/// Hoists the side blocks into the head, replaces join phis with selects
/// and deletes the side blocks. Throws UserError("legality violated ...")
/// without touching anything if C no longer describes a legal region of F.
Function convertCandidate(const Module &M, const Function &F,
                          const Candidate &C);

enum class ApplyOutcome { Converted, SkippedBitZero, SkippedBecameIllegal };

std::string_view outcomeName(ApplyOutcome O);

struct ApplyEntry {
  std::size_t Index = 0;
  std::size_t Site = 0;
  bool Bit = false;
  ApplyOutcome Outcome = ApplyOutcome::SkippedBitZero;
};

struct ApplyReport {
  std::vector<ApplyEntry> Entries;
  std::size_t Converted = 0;

  /// `index,branch_site,bit,outcome`.
  std::string csv(char Sep = ',') const;
};

/// Converts the module's candidates whose bit is set, in index order,
/// re-checking legality against the partially converted function. Throws
/// UserError on a length mismatch.
std::pair<Module, ApplyReport> applyBitmask(const Module &M, const Bitmask &B);

/// Static profitability: the critical-path extension stays within half the
/// misprediction penalty, and the expected misprediction saving covers the
/// issue cost of the nullified side.
bool baselineDecide(const FeatureVector &FV, const MachineModel &MM);

} // namespace predicator

#endif // PREDICATOR_IFCONVERSION_H
