//===-- predicator/CFG.h - Control-flow analyses ----------------*- C++ -*-===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Predecessor/successor lists, immediate dominators, dominator-tree
// post-order and natural-loop nesting depth. Block identities are indices
// into Function::Blocks.
//
//===----------------------------------------------------------------------===//

#ifndef PREDICATOR_CFG_H
#define PREDICATOR_CFG_H

#include "predicator/IR.h"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace predicator {

struct CfgInfo {
  /// Unique predecessors, ordered by block index.
  std::vector<std::vector<std::size_t>> Preds;
  /// Successors in terminator order (br true target first).
  std::vector<std::vector<std::size_t>> Succs;
  std::vector<std::optional<std::size_t>> IDom;
  /// Dominator tree post-order; children visited in block-list order.
  std::vector<std::size_t> DomPostOrder;
  std::vector<unsigned> LoopDepth;
  std::vector<bool> Reachable;

  /// Reflexive dominance over reachable blocks.
  bool dominates(std::size_t A, std::size_t B) const;
};

/// Tolerant variant used by the validator: edges to unknown labels are
/// dropped and unreachable blocks are left without an idom.
CfgInfo computeCfg(const Function &F);

/// Throws UserError if the function has dangling labels or unreachable
/// blocks; otherwise returns the full analysis.
CfgInfo analyzeCFG(const Function &F);

/// A conditional branch, identified by function and head block index.
struct BranchSite {
  std::size_t Function = 0;
  std::size_t Block = 0;
};

/// Numbers every br in (function order, dominator-tree post-order). Position
/// in the returned vector is the site id.
std::vector<BranchSite> numberBranchSites(const Module &M);

inline std::string siteName(std::size_t Id) { return "b" + std::to_string(Id); }

} // namespace predicator

#endif // PREDICATOR_CFG_H
