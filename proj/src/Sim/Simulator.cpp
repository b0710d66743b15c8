//===-- Simulator.cpp - Trace-driven cycle model --------------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "predicator/Simulator.h"
#include "predicator/CFG.h"
#include "predicator/Error.h"

#include <algorithm>
#include <sstream>

using namespace predicator;

bool PredictorState::predictAndUpdate(std::size_t Site, bool Taken) {
  std::uint8_t &C = Counters.at(Site);
  bool Prediction = C >= 2;
  if (Taken && C < 3)
    ++C;
  else if (!Taken && C > 0)
    --C;
  return Prediction;
}

void PredictorState::setCounter(std::size_t Site, std::uint8_t V) {
  if (V > 3)
    throw UserError("2-bit counter value out of range");
  Counters.at(Site) = V;
}

std::string SimResult::csv(char Sep) const {
  std::ostringstream OS;
  OS << "cycles" << Sep << "dynamic_instructions" << Sep << "branches" << Sep
     << "mispredictions\n"
     << Cycles << Sep << DynamicInstructions << Sep << Branches << Sep
     << Mispredictions << '\n';
  return OS.str();
}

SimResult predicator::simulateTrace(const Module &M, std::string_view Fn,
                                    const ExecResult &Exec,
                                    const MachineModel &MM) {
  auto FI = M.functionIndex(Fn);
  if (!FI)
    throw UserError("no function named '@" + std::string(Fn) + "'");
  if (Exec.Trace.size() != Exec.DynamicCount)
    throw UserError("execution was recorded without a trace");
  LoweredFunction L = lowerFunction(M, *FI);

  std::vector<BranchSite> Sites = numberBranchSites(M);
  SimResult R;
  for (const BranchSite &S : Sites)
    R.Sites.push_back({"@" + M.Functions[S.Function].Name + ":" +
                           M.Functions[S.Function].Blocks[S.Block].Label,
                       0, 0});
  PredictorState Predictor(Sites.size());

  std::vector<std::uint64_t> Ready(L.NumValues, 0);
  std::vector<std::uint64_t> LastStoreReady(M.Memories.size(), 0);
  std::uint64_t LastIssue = 0, IssuedThisCycle = 0, FetchReady = 0, Finish = 0;
  const std::uint64_t Width = std::max(1u, MM.IssueWidth);
  auto readyOf = [&](const LoweredOperand &O) -> std::uint64_t {
    return O.Slot < 0 ? 0 : Ready[O.Slot];
  };

  for (const TraceEntry &E : Exec.Trace) {
    const LoweredInst &I = L.Blocks[E.Block][E.Slot];
    if (I.Op == Opcode::Phi) {
      // Zero-latency rename; occupies no issue slot.
      Ready[I.Dest] = readyOf(I.Operands[E.Aux]);
      continue;
    }
    std::uint64_t T = std::max(LastIssue, FetchReady);
    for (const LoweredOperand &O : I.Operands)
      T = std::max(T, readyOf(O));
    if (I.Op == Opcode::Load || I.Op == Opcode::Store)
      T = std::max(T, LastStoreReady[I.Memory]);
    if (T == LastIssue && IssuedThisCycle >= Width)
      ++T;
    if (T != LastIssue)
      IssuedThisCycle = 0;
    LastIssue = T;
    ++IssuedThisCycle;

    std::uint64_t Done = T + MM.latency(I.Op);
    Finish = std::max(Finish, Done);
    if (I.Dest >= 0)
      Ready[I.Dest] = Done;
    if (I.Op == Opcode::Store)
      LastStoreReady[I.Memory] = std::max(LastStoreReady[I.Memory], Done);
    if (I.Op == Opcode::Br) {
      bool Taken = E.Aux != 0;
      bool Predicted = Taken;
      switch (MM.Predictor) {
      case PredictorKind::TwoBit:
        Predicted = Predictor.predictAndUpdate(I.Site, Taken);
        break;
      case PredictorKind::AlwaysTaken:
        Predicted = true;
        break;
      case PredictorKind::Oracle:
        break;
      }
      ++R.Branches;
      ++R.Sites[I.Site].Executions;
      if (Predicted != Taken) {
        ++R.Mispredictions;
        ++R.Sites[I.Site].Mispredictions;
        FetchReady = Done + MM.MispredictPenalty;
      }
    }
  }
  R.Cycles = Finish;
  R.DynamicInstructions = Exec.DynamicCount;
  return R;
}

SimResult predicator::simulate(const Module &M, std::string_view Fn,
                               const Inputs &In, const MachineModel &MM) {
  ExecResult Exec = interpret(M, Fn, In);
  return simulateTrace(M, Fn, Exec, MM);
}

Rational predicator::speedup(const SimResult &Base, const SimResult &Cand) {
  if (Base.Cycles == 0 || Cand.Cycles == 0)
    throw UserError("speedup undefined for a zero-cycle simulation");
  return Rational(static_cast<std::int64_t>(Base.Cycles),
                  static_cast<std::int64_t>(Cand.Cycles));
}
