//===-- IfConversion.cpp - Bitmask-driven if-conversion -------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Conversion splices the side-block bodies into the head (true side first)
// and turns every join phi into a select on the branch condition. Only
// speculation-safe side blocks qualify: no stores, no division by a value
// that might be zero, and loads only from constant in-range cells.
//
//===----------------------------------------------------------------------===//

#include "predicator/IfConversion.h"
#include "predicator/Error.h"

#include <algorithm>
#include <set>
#include <sstream>

using namespace predicator;

std::string_view predicator::shapeName(CandidateShape S) {
  switch (S) {
  case CandidateShape::TriangleTrue:
    return "triangle-true";
  case CandidateShape::TriangleFalse:
    return "triangle-false";
  case CandidateShape::Diamond:
    return "diamond";
  }
  return "unknown";
}

std::string_view predicator::outcomeName(ApplyOutcome O) {
  switch (O) {
  case ApplyOutcome::Converted:
    return "converted";
  case ApplyOutcome::SkippedBitZero:
    return "skipped-bit-0";
  case ApplyOutcome::SkippedBecameIllegal:
    return "skipped-became-illegal";
  }
  return "unknown";
}

std::size_t Bitmask::popcount() const {
  return static_cast<std::size_t>(std::count(Bits.begin(), Bits.end(), true));
}

std::string Bitmask::str() const {
  std::string S;
  for (bool B : Bits)
    S += B ? '1' : '0';
  return S;
}

Bitmask Bitmask::parse(std::string_view Text) {
  Bitmask B;
  for (char C : Text) {
    if (C != '0' && C != '1')
      throw UserError("bitmask may contain only '0' and '1', got '" +
                      std::string(Text) + "'");
    B.Bits.push_back(C == '1');
  }
  return B;
}

Bitmask Bitmask::fromInteger(std::uint64_t Value, std::size_t Width) {
  Bitmask B;
  for (std::size_t I = 0; I < Width; ++I)
    B.Bits.push_back((Value >> I) & 1);
  return B;
}

namespace {

/// Reasons a side block's instructions cannot be executed unconditionally.
void checkSpeculatable(const Module &M, const BasicBlock &Side,
                       std::set<std::string> &Reasons) {
  if (!Side.Phis.empty())
    Reasons.insert("phi-not-selectable");
  for (const Instruction &I : Side.Body) {
    switch (I.Op) {
    case Opcode::Store:
      Reasons.insert("side-effect");
      break;
    case Opcode::Div:
    case Opcode::Rem:
      if (!I.Operands[1].IsImm || I.Operands[1].Imm == 0)
        Reasons.insert("speculation-unsafe");
      break;
    case Opcode::Load: {
      auto MI = M.memoryIndex(I.Memory);
      const Operand &Idx = I.Operands[0];
      if (!MI || !Idx.IsImm || Idx.Imm < 0 ||
          static_cast<std::uint64_t>(Idx.Imm) >= M.Memories[*MI].Length)
        Reasons.insert("speculation-unsafe");
      break;
    }
    default:
      break;
    }
  }
}

bool samePreds(const CfgInfo &Cfg, std::size_t B,
               std::initializer_list<std::size_t> Expected) {
  std::vector<std::size_t> E(Expected);
  std::sort(E.begin(), E.end());
  E.erase(std::unique(E.begin(), E.end()), E.end());
  return Cfg.Preds[B] == E;
}

} // namespace

Legality predicator::checkLegalityAt(const Module &M, const Function &F,
                                     const CfgInfo &Cfg, std::size_t Head,
                                     Candidate *Match) {
  Legality L;
  const BasicBlock &H = F.Blocks[Head];
  auto fail = [&](std::string Reason) {
    L.Reasons.push_back(std::move(Reason));
    return L;
  };
  if (H.Term.Op != Opcode::Br)
    return fail("shape");
  auto TI = F.blockIndex(H.Term.Target), FI = F.blockIndex(H.Term.FalseTarget);
  if (!TI || !FI)
    return fail("shape");
  if (*TI == *FI)
    return fail("critical-edge");

  // A side block ends in an unconditional jump; returns where it goes.
  auto sideJoin = [&](std::size_t X) -> std::optional<std::size_t> {
    if (X == Head || X == 0 || F.Blocks[X].Term.Op != Opcode::Jmp)
      return std::nullopt;
    return F.blockIndex(F.Blocks[X].Term.Target);
  };

  Candidate C;
  C.Function = F.Name;
  C.Head = H.Label;
  std::optional<std::size_t> TJ = sideJoin(*TI), FJ = sideJoin(*FI);
  std::optional<std::size_t> TrueSide, FalseSide;
  std::size_t Join;
  if (TJ && *TJ == *FI) {
    C.Shape = CandidateShape::TriangleTrue;
    TrueSide = *TI;
    Join = *FI;
  } else if (FJ && *FJ == *TI) {
    C.Shape = CandidateShape::TriangleFalse;
    FalseSide = *FI;
    Join = *TI;
  } else if (TJ && FJ && *TJ == *FJ) {
    C.Shape = CandidateShape::Diamond;
    TrueSide = *TI;
    FalseSide = *FI;
    Join = *TJ;
  } else {
    return fail("shape");
  }
  if (Join == Head || Join == TrueSide || Join == FalseSide)
    return fail("shape");

  std::set<std::string> Reasons;
  for (auto Side : {TrueSide, FalseSide}) {
    if (!Side)
      continue;
    if (!samePreds(Cfg, *Side, {Head}))
      Reasons.insert("multi-pred");
    checkSpeculatable(M, F.Blocks[*Side], Reasons);
  }
  std::size_t TruePred = TrueSide.value_or(Head);
  std::size_t FalsePred = FalseSide.value_or(Head);
  if (!samePreds(Cfg, Join, {TruePred, FalsePred}))
    Reasons.insert("multi-pred");
  const BasicBlock &J = F.Blocks[Join];
  for (const Phi &P : J.Phis) {
    if (!P.incomingFor(F.Blocks[TruePred].Label) ||
        !P.incomingFor(F.Blocks[FalsePred].Label))
      Reasons.insert("phi-not-selectable");
    C.Phis.push_back(P.Result);
  }
  L.Reasons.assign(Reasons.begin(), Reasons.end());
  L.Legal = L.Reasons.empty();
  if (L.Legal && Match) {
    if (TrueSide)
      C.TrueSide = F.Blocks[*TrueSide].Label;
    if (FalseSide)
      C.FalseSide = F.Blocks[*FalseSide].Label;
    C.Join = J.Label;
    C.Index = Match->Index;
    C.Site = Match->Site;
    *Match = std::move(C);
  }
  return L;
}

std::vector<Candidate> predicator::findCandidates(const Module &M,
                                                  const Function &F,
                                                  const CfgInfo &Cfg) {
  std::vector<Candidate> Out;
  std::size_t Site = 0;
  for (std::size_t B : Cfg.DomPostOrder) {
    if (F.Blocks[B].Term.Op != Opcode::Br)
      continue;
    Candidate C;
    C.Index = Out.size();
    C.Site = Site++;
    if (checkLegalityAt(M, F, Cfg, B, &C).Legal)
      Out.push_back(std::move(C));
  }
  return Out;
}

std::vector<Candidate> predicator::findModuleCandidates(const Module &M) {
  std::vector<Candidate> Out;
  std::size_t SiteBase = 0;
  for (const Function &F : M.Functions) {
    CfgInfo Cfg = analyzeCFG(F);
    for (Candidate &C : findCandidates(M, F, Cfg)) {
      C.Index = Out.size();
      C.Site += SiteBase;
      Out.push_back(std::move(C));
    }
    for (std::size_t B : Cfg.DomPostOrder)
      SiteBase += F.Blocks[B].Term.Op == Opcode::Br;
  }
  return Out;
}

Legality predicator::checkLegality(const Module &M, const Function &F,
                                   std::size_t Site) {
  CfgInfo Cfg = analyzeCFG(F);
  std::size_t N = 0;
  for (std::size_t B : Cfg.DomPostOrder) {
    if (F.Blocks[B].Term.Op != Opcode::Br)
      continue;
    if (N++ == Site)
      return checkLegalityAt(M, F, Cfg, B);
  }
  throw UserError("unknown branch site " + siteName(Site) + " in '@" + F.Name +
                  "'");
}

Function predicator::convertCandidate(const Module &M, const Function &F,
                                      const Candidate &C) {
  auto HeadIdx = F.blockIndex(C.Head);
  auto violated = [&](const std::string &Why) {
    return UserError("legality violated: candidate " + std::to_string(C.Index) +
                     " at '" + C.Head + "': " + Why);
  };
  if (!HeadIdx)
    throw violated("head block no longer exists");
  CfgInfo Cfg = computeCfg(F);
  Candidate Current;
  Legality L = checkLegalityAt(M, F, Cfg, *HeadIdx, &Current);
  if (!L.Legal) {
    std::string Why;
    for (const std::string &R : L.Reasons)
      Why += (Why.empty() ? "" : ", ") + R;
    throw violated(Why);
  }
  if (!Current.sameRegion(C))
    throw violated("region changed since discovery");

  Function Out = F;
  BasicBlock &Head = Out.Blocks[*HeadIdx];
  BasicBlock &Join = *Out.block(C.Join);
  Operand Cond = Head.Term.Value;
  for (const auto &Side : {C.TrueSide, C.FalseSide}) {
    if (!Side)
      continue;
    const BasicBlock &S = *F.block(*Side);
    Head.Body.insert(Head.Body.end(), S.Body.begin(), S.Body.end());
  }
  for (const Phi &P : Join.Phis) {
    Instruction Sel;
    Sel.Result = P.Result;
    Sel.Op = Opcode::Select;
    Sel.Operands = {Cond, *P.incomingFor(C.truePred()),
                    *P.incomingFor(C.falsePred())};
    Head.Body.push_back(std::move(Sel));
  }
  Head.Term = Terminator::jmp(C.Join);
  Join.Phis.clear();
  std::erase_if(Out.Blocks, [&](const BasicBlock &BB) {
    return BB.Label == C.TrueSide || BB.Label == C.FalseSide;
  });
  return Out;
}

std::string ApplyReport::csv(char Sep) const {
  std::ostringstream OS;
  OS << "index" << Sep << "branch_site" << Sep << "bit" << Sep << "outcome\n";
  for (const ApplyEntry &E : Entries)
    OS << E.Index << Sep << siteName(E.Site) << Sep << (E.Bit ? 1 : 0) << Sep
       << outcomeName(E.Outcome) << '\n';
  return OS.str();
}

std::pair<Module, ApplyReport> predicator::applyBitmask(const Module &M,
                                                        const Bitmask &B) {
  std::vector<Candidate> Cands = findModuleCandidates(M);
  if (B.size() != Cands.size())
    throw UserError("bitmask length mismatch: expected " +
                    std::to_string(Cands.size()) + ", got " +
                    std::to_string(B.size()));
  Module Out = M;
  ApplyReport Report;
  for (const Candidate &C : Cands) {
    ApplyEntry E{C.Index, C.Site, B.Bits[C.Index],
                 ApplyOutcome::SkippedBitZero};
    if (E.Bit) {
      Function &F = Out.Functions[*Out.functionIndex(C.Function)];
      auto Head = F.blockIndex(C.Head);
      Candidate Current;
      bool Legal = false;
      if (Head) {
        CfgInfo Cfg = computeCfg(F);
        Legal = checkLegalityAt(Out, F, Cfg, *Head, &Current).Legal &&
                Current.sameRegion(C);
      }
      if (Legal) {
        F = convertCandidate(Out, F, C);
        E.Outcome = ApplyOutcome::Converted;
        ++Report.Converted;
      } else {
        E.Outcome = ApplyOutcome::SkippedBecameIllegal;
      }
    }
    Report.Entries.push_back(E);
  }
  return {std::move(Out), std::move(Report)};
}

bool predicator::baselineDecide(const FeatureVector &FV,
                                const MachineModel &MM) {
  Rational Penalty(MM.MispredictPenalty);
  Rational LongerSide = std::max(FV.TrueCP, FV.FalseCP);
  Rational Extension = FV.MergedCP - LongerSide;
  if (Extension > Penalty / Rational(2))
    return false;

  // Work thrown away on the path not taken: the cheaper of the sides that
  // exist. An absent triangle side costs nothing and is not considered.
  std::optional<Rational> Nullified;
  if (FV.HasTrueSide)
    Nullified = FV.TrueLatency;
  if (FV.HasFalseSide)
    Nullified = Nullified ? std::min(*Nullified, FV.FalseLatency)
                          : FV.FalseLatency;
  Rational Cost =
      Nullified.value_or(Rational(0)) / Rational(MM.IssueWidth);
  return MM.AssumedMisrate * Penalty >= Cost;
}
