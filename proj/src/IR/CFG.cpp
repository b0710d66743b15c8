//===-- CFG.cpp - Control-flow analyses -----------------------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Dominators use the Cooper/Harvey/Kennedy iterative scheme over reverse
// post-order. Loops are natural loops: a back edge N->H with H dominating N
// contributes H plus every block that reaches N without passing through H.
// Back edges sharing a header form one loop.
//
//===----------------------------------------------------------------------===//

#include "predicator/CFG.h"
#include "predicator/Error.h"

#include <algorithm>
#include <map>
#include <set>

using namespace predicator;

bool CfgInfo::dominates(std::size_t A, std::size_t B) const {
  if (!Reachable[A] || !Reachable[B])
    return false;
  for (std::optional<std::size_t> N = B; N; N = IDom[*N])
    if (*N == A)
      return true;
  return false;
}

CfgInfo predicator::computeCfg(const Function &F) {
  const std::size_t N = F.Blocks.size();
  CfgInfo Info;
  Info.Preds.resize(N);
  Info.Succs.resize(N);
  Info.IDom.assign(N, std::nullopt);
  Info.LoopDepth.assign(N, 0);
  Info.Reachable.assign(N, false);
  if (N == 0)
    return Info;

  for (std::size_t B = 0; B < N; ++B) {
    for (const std::string &S : F.Blocks[B].Term.successors()) {
      auto SI = F.blockIndex(S);
      if (!SI)
        continue;
      Info.Succs[B].push_back(*SI);
      auto &P = Info.Preds[*SI];
      if (std::find(P.begin(), P.end(), B) == P.end())
        P.push_back(B);
    }
  }
  for (auto &P : Info.Preds)
    std::sort(P.begin(), P.end());

  // Reverse post-order by DFS from the entry, true successor first.
  std::vector<std::size_t> PostOrder;
  {
    std::vector<std::pair<std::size_t, std::size_t>> Stack{{0, 0}};
    Info.Reachable[0] = true;
    while (!Stack.empty()) {
      auto &[B, NextSucc] = Stack.back();
      if (NextSucc < Info.Succs[B].size()) {
        std::size_t S = Info.Succs[B][NextSucc++];
        if (!Info.Reachable[S]) {
          Info.Reachable[S] = true;
          Stack.push_back({S, 0});
        }
      } else {
        PostOrder.push_back(B);
        Stack.pop_back();
      }
    }
  }
  std::vector<std::size_t> RPONumber(N, 0);
  std::vector<std::size_t> RPO(PostOrder.rbegin(), PostOrder.rend());
  for (std::size_t I = 0; I < RPO.size(); ++I)
    RPONumber[RPO[I]] = I;

  std::vector<std::optional<std::size_t>> Doms(N);
  Doms[0] = 0;
  auto intersect = [&](std::size_t A, std::size_t B) {
    while (A != B) {
      while (RPONumber[A] > RPONumber[B])
        A = *Doms[A];
      while (RPONumber[B] > RPONumber[A])
        B = *Doms[B];
    }
    return A;
  };
  for (bool Changed = true; Changed;) {
    Changed = false;
    for (std::size_t I = 1; I < RPO.size(); ++I) {
      std::size_t B = RPO[I];
      std::optional<std::size_t> NewIDom;
      for (std::size_t P : Info.Preds[B]) {
        if (!Info.Reachable[P] || !Doms[P])
          continue;
        NewIDom = NewIDom ? intersect(P, *NewIDom) : P;
      }
      if (NewIDom && Doms[B] != NewIDom) {
        Doms[B] = NewIDom;
        Changed = true;
      }
    }
  }
  for (std::size_t B = 1; B < N; ++B)
    if (Info.Reachable[B])
      Info.IDom[B] = Doms[B];

  // Dominator-tree post-order, children in block-list order.
  std::vector<std::vector<std::size_t>> Children(N);
  for (std::size_t B = 1; B < N; ++B)
    if (Info.IDom[B])
      Children[*Info.IDom[B]].push_back(B);
  {
    std::vector<std::pair<std::size_t, std::size_t>> Stack{{0, 0}};
    while (!Stack.empty()) {
      auto &[B, NextChild] = Stack.back();
      if (NextChild < Children[B].size()) {
        std::size_t C = Children[B][NextChild++];
        Stack.push_back({C, 0});
      } else {
        Info.DomPostOrder.push_back(B);
        Stack.pop_back();
      }
    }
  }

  // Natural loops grouped by header.
  std::map<std::size_t, std::set<std::size_t>> Loops;
  for (std::size_t B = 0; B < N; ++B) {
    if (!Info.Reachable[B])
      continue;
    for (std::size_t H : Info.Succs[B]) {
      if (!Info.dominates(H, B))
        continue;
      auto &Body = Loops[H];
      Body.insert(H);
      std::vector<std::size_t> Work;
      if (Body.insert(B).second)
        Work.push_back(B);
      while (!Work.empty()) {
        std::size_t X = Work.back();
        Work.pop_back();
        for (std::size_t P : Info.Preds[X])
          if (Info.Reachable[P] && Body.insert(P).second)
            Work.push_back(P);
      }
    }
  }
  for (const auto &[Header, Body] : Loops)
    for (std::size_t B : Body)
      ++Info.LoopDepth[B];
  return Info;
}

CfgInfo predicator::analyzeCFG(const Function &F) {
  if (F.Blocks.empty())
    throw UserError("function '@" + F.Name + "' has no blocks");
  for (const BasicBlock &BB : F.Blocks)
    for (const std::string &S : BB.Term.successors())
      if (!F.block(S))
        throw UserError("function '@" + F.Name + "': block '" + BB.Label +
                        "' branches to unknown label '" + S + "'");
  CfgInfo Info = computeCfg(F);
  for (std::size_t B = 0; B < F.Blocks.size(); ++B)
    if (!Info.Reachable[B])
      throw UserError("function '@" + F.Name + "': block '" +
                      F.Blocks[B].Label + "' is unreachable");
  return Info;
}

std::vector<BranchSite> predicator::numberBranchSites(const Module &M) {
  std::vector<BranchSite> Sites;
  for (std::size_t FI = 0; FI < M.Functions.size(); ++FI) {
    const Function &F = M.Functions[FI];
    CfgInfo Info = computeCfg(F);
    for (std::size_t B : Info.DomPostOrder)
      if (F.Blocks[B].Term.Op == Opcode::Br)
        Sites.push_back({FI, B});
  }
  return Sites;
}
