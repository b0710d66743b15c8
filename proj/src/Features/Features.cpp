//===-- Features.cpp - Per-branch code features ---------------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "predicator/Features.h"
#include "predicator/Error.h"
#include "predicator/IfConversion.h"

#include <algorithm>
#include <map>
#include <sstream>

using namespace predicator;

Region Region::fromInstructions(const std::vector<Instruction> &Insts) {
  Region R;
  std::map<std::string, std::size_t> DefNode;
  for (const Instruction &I : Insts) {
    RegionNode N;
    N.Op = I.Op;
    for (const Operand &O : I.Operands) {
      if (O.IsImm)
        continue;
      auto It = DefNode.find(O.Name);
      if (It != DefNode.end() &&
          std::find(N.Deps.begin(), N.Deps.end(), It->second) == N.Deps.end())
        N.Deps.push_back(It->second);
    }
    if (!I.Result.empty())
      DefNode[I.Result] = R.Nodes.size();
    R.Nodes.push_back(std::move(N));
  }
  return R;
}

RegionSchedule predicator::scheduleRegion(const Region &R,
                                          const LatencyTable &Lat) {
  const std::size_t N = R.Nodes.size();
  auto lat = [&](std::size_t I) -> std::uint64_t {
    return Lat[static_cast<std::size_t>(R.Nodes[I].Op)];
  };
  std::vector<std::vector<std::size_t>> Users(N);
  std::vector<std::size_t> Pending(N, 0);
  for (std::size_t I = 0; I < N; ++I) {
    for (std::size_t D : R.Nodes[I].Deps) {
      if (D >= N)
        throw InternalError("region dependence out of range");
      Users[D].push_back(I);
    }
    Pending[I] = R.Nodes[I].Deps.size();
  }
  // Kahn's algorithm; lowest index first keeps the order deterministic.
  std::vector<std::size_t> Topo, Ready;
  for (std::size_t I = N; I-- > 0;)
    if (Pending[I] == 0)
      Ready.push_back(I);
  while (!Ready.empty()) {
    std::size_t I = Ready.back();
    Ready.pop_back();
    Topo.push_back(I);
    for (std::size_t U : Users[I])
      if (--Pending[U] == 0)
        Ready.push_back(U);
  }
  if (Topo.size() != N)
    throw InternalError("dependence cycle in region");

  RegionSchedule S;
  S.Asap.assign(N, 0);
  for (std::size_t I : Topo)
    for (std::size_t D : R.Nodes[I].Deps)
      S.Asap[I] = std::max(S.Asap[I], S.Asap[D] + lat(D));
  for (std::size_t I = 0; I < N; ++I)
    S.CriticalPath = std::max(S.CriticalPath, S.Asap[I] + lat(I));
  S.Alap.assign(N, 0);
  for (auto It = Topo.rbegin(); It != Topo.rend(); ++It) {
    std::size_t I = *It;
    std::uint64_t Latest = S.CriticalPath - lat(I);
    for (std::size_t U : Users[I])
      Latest = std::min(Latest, S.Alap[U] - lat(I));
    S.Alap[I] = Latest;
  }
  return S;
}

std::uint64_t predicator::regionCriticalPath(const Region &R,
                                             const LatencyTable &Lat) {
  return scheduleRegion(R, Lat).CriticalPath;
}

std::uint64_t predicator::slackSum(const Region &R, const LatencyTable &Lat) {
  RegionSchedule S = scheduleRegion(R, Lat);
  std::uint64_t Sum = 0;
  for (std::size_t I = 0; I < R.Nodes.size(); ++I)
    Sum += S.Alap[I] - S.Asap[I];
  return Sum;
}

std::uint64_t predicator::totalLatency(const Region &R,
                                       const LatencyTable &Lat) {
  std::uint64_t Sum = 0;
  for (const RegionNode &N : R.Nodes)
    Sum += Lat[static_cast<std::size_t>(N.Op)];
  return Sum;
}

namespace {

Rational cycles(std::uint64_t V) { return Rational(static_cast<std::int64_t>(V)); }

/// ASAP start of the instruction defining `V` within `Side`, or 0 when the
/// value comes from outside the side block.
std::uint64_t sideDepth(const std::vector<Instruction> &Side,
                        const RegionSchedule &S, const Operand &V) {
  if (V.IsImm)
    return 0;
  for (std::size_t I = Side.size(); I-- > 0;)
    if (Side[I].Result == V.Name)
      return S.Asap[I];
  return 0;
}

} // namespace

FeatureVector predicator::extractFeatures(const Module &M, const Function &F,
                                          const Candidate &C,
                                          const MachineModel &MM,
                                          const CfgInfo &Cfg) {
  auto HeadIdx = F.blockIndex(C.Head);
  Candidate Current;
  if (!HeadIdx || !checkLegalityAt(M, F, Cfg, *HeadIdx, &Current).Legal ||
      !Current.sameRegion(C))
    throw UserError("features requested for an illegal candidate at '" +
                    C.Head + "'");
  const LatencyTable &Lat = MM.Latency;
  const BasicBlock &Head = F.Blocks[*HeadIdx];
  const BasicBlock &Join = *F.block(C.Join);
  static const std::vector<Instruction> Empty;
  const std::vector<Instruction> &TrueBody =
      C.TrueSide ? F.block(*C.TrueSide)->Body : Empty;
  const std::vector<Instruction> &FalseBody =
      C.FalseSide ? F.block(*C.FalseSide)->Body : Empty;

  FeatureVector FV;
  FV.HasTrueSide = C.TrueSide.has_value();
  FV.HasFalseSide = C.FalseSide.has_value();
  FV.BBSize = cycles(Head.size());

  Region TrueRegion = Region::fromInstructions(TrueBody);
  Region FalseRegion = Region::fromInstructions(FalseBody);
  RegionSchedule TrueSched = scheduleRegion(TrueRegion, Lat);
  RegionSchedule FalseSched = scheduleRegion(FalseRegion, Lat);
  FV.TrueCP = cycles(TrueSched.CriticalPath);
  FV.FalseCP = cycles(FalseSched.CriticalPath);
  FV.MinCP = std::min(FV.TrueCP, FV.FalseCP);
  FV.TrueLatency = cycles(totalLatency(TrueRegion, Lat));
  FV.FalseLatency = cycles(totalLatency(FalseRegion, Lat));

  // Merged region: head body, true side, false side, then one select per
  // join phi.
  std::vector<Instruction> Merged = Head.Body;
  Merged.insert(Merged.end(), TrueBody.begin(), TrueBody.end());
  Merged.insert(Merged.end(), FalseBody.begin(), FalseBody.end());
  std::size_t FirstSelect = Merged.size();
  for (const Phi &P : Join.Phis) {
    Instruction Sel;
    Sel.Result = P.Result;
    Sel.Op = Opcode::Select;
    Sel.Operands = {Head.Term.Value, *P.incomingFor(C.truePred()),
                    *P.incomingFor(C.falsePred())};
    Merged.push_back(std::move(Sel));
  }
  Region MergedRegion = Region::fromInstructions(Merged);
  RegionSchedule MS = scheduleRegion(MergedRegion, Lat);
  FV.MergedCP = cycles(MS.CriticalPath);
  FV.MergedLatency = cycles(totalLatency(MergedRegion, Lat));
  if (MS.CriticalPath > 0)
    FV.UnexploitedILP = FV.MergedLatency / FV.MergedCP;
  else if (!Merged.empty())
    FV.UnexploitedILP = Rational(1);

  const Operand &Cond = Head.Term.Value;
  if (Cond.isValue())
    for (std::size_t I = Head.Body.size(); I-- > 0;)
      if (Head.Body[I].Result == Cond.Name) {
        FV.BranchDepth = cycles(MS.Asap[I]);
        break;
      }

  FV.LoopDepth = cycles(Cfg.LoopDepth[*HeadIdx]);
  std::uint64_t Slack = 0;
  for (std::size_t I = 0; I < Merged.size(); ++I)
    Slack += MS.Alap[I] - MS.Asap[I];
  FV.SlackSum = cycles(Slack);

  std::uint64_t SelectLat = MM.latency(Opcode::Select);
  std::uint64_t MaxDepth = 0, TrueDepth = 0, FalseDepth = 0;
  for (std::size_t K = 0; K < Join.Phis.size(); ++K) {
    std::size_t I = FirstSelect + K;
    MaxDepth = std::max(MaxDepth, MS.Alap[I]);
    const Phi &P = Join.Phis[K];
    TrueDepth = std::max(TrueDepth, sideDepth(TrueBody, TrueSched,
                                              *P.incomingFor(C.truePred())) +
                                        SelectLat);
    FalseDepth = std::max(FalseDepth, sideDepth(FalseBody, FalseSched,
                                                *P.incomingFor(C.falsePred())) +
                                          SelectLat);
  }
  FV.MaxDepth = cycles(MaxDepth);
  FV.TrueBBDepth = cycles(TrueDepth);
  FV.FalseBBDepth = cycles(FalseDepth);
  return FV;
}

std::vector<NormalizedVector>
predicator::normalizeFeatures(const std::vector<FeatureVector> &Vs) {
  if (Vs.empty())
    throw UserError("cannot normalize an empty feature set");
  std::vector<std::array<Rational, NumFeatures>> Rows;
  for (const FeatureVector &V : Vs)
    Rows.push_back(V.values());
  std::vector<NormalizedVector> Out(Vs.size());
  for (std::size_t F = 0; F < NumFeatures; ++F) {
    Rational Lo = Rows[0][F], Hi = Rows[0][F];
    for (const auto &R : Rows) {
      Lo = std::min(Lo, R[F]);
      Hi = std::max(Hi, R[F]);
    }
    for (std::size_t I = 0; I < Rows.size(); ++I)
      Out[I][F] = Hi == Lo ? 0.0 : ((Rows[I][F] - Lo) / (Hi - Lo)).toDouble();
  }
  return Out;
}

std::string predicator::featuresCsv(const std::vector<FeatureVector> &Vs,
                                    char Sep) {
  std::ostringstream OS;
  for (std::size_t F = 0; F < NumFeatures; ++F)
    OS << (F ? std::string(1, Sep) : "") << FeatureNames[F];
  OS << '\n';
  for (const FeatureVector &V : Vs) {
    auto Vals = V.values();
    for (std::size_t F = 0; F < NumFeatures; ++F)
      OS << (F ? std::string(1, Sep) : "") << Vals[F].toFixed(6);
    OS << '\n';
  }
  return OS.str();
}
