//===-- Interpreter.cpp - Reference interpreter ---------------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "predicator/Interpreter.h"
#include "predicator/CFG.h"

#include <algorithm>
#include <map>
#include <span>

using namespace predicator;

std::string_view predicator::trapKindName(TrapKind K) {
  switch (K) {
  case TrapKind::DivideByZero:
    return "divide-by-zero";
  case TrapKind::OutOfBounds:
    return "out-of-bounds";
  case TrapKind::StepBudget:
    return "step-budget";
  }
  return "unknown";
}

std::vector<std::array<std::int64_t, 3>> ExecResult::storeSequence() const {
  std::vector<std::array<std::int64_t, 3>> Out;
  for (const TraceEntry &E : Trace)
    if (E.Op == Opcode::Store)
      Out.push_back({static_cast<std::int64_t>(E.Aux),
                     TraceOperands[E.OperandBegin],
                     TraceOperands[E.OperandBegin + 1]});
  return Out;
}

LoweredFunction predicator::lowerFunction(const Module &M, std::size_t FnIndex) {
  const Function &F = M.Functions.at(FnIndex);
  LoweredFunction L;
  std::map<std::string, std::int32_t> Slots;
  auto slotFor = [&](const std::string &Name) {
    auto [It, Inserted] = Slots.emplace(Name, static_cast<std::int32_t>(L.NumValues));
    if (Inserted)
      ++L.NumValues;
    return It->second;
  };
  for (const std::string &P : F.Params)
    L.ParamSlots.push_back(slotFor(P));
  for (const BasicBlock &BB : F.Blocks) {
    for (const Phi &P : BB.Phis)
      slotFor(P.Result);
    for (const Instruction &I : BB.Body)
      if (!I.Result.empty())
        slotFor(I.Result);
  }
  auto lowerOperand = [&](const Operand &O) {
    if (O.IsImm)
      return LoweredOperand{-1, O.Imm};
    auto It = Slots.find(O.Name);
    if (It == Slots.end())
      throw UserError("use of undefined value '%" + O.Name + "'");
    return LoweredOperand{It->second, 0};
  };
  auto blockId = [&](const std::string &Label) {
    auto I = F.blockIndex(Label);
    if (!I)
      throw UserError("unknown label '" + Label + "'");
    return static_cast<std::uint32_t>(*I);
  };

  std::vector<std::uint32_t> SiteOf(F.Blocks.size(), 0);
  auto Sites = numberBranchSites(M);
  for (std::size_t S = 0; S < Sites.size(); ++S)
    if (Sites[S].Function == FnIndex)
      SiteOf[Sites[S].Block] = static_cast<std::uint32_t>(S);

  for (std::size_t B = 0; B < F.Blocks.size(); ++B) {
    const BasicBlock &BB = F.Blocks[B];
    std::vector<LoweredInst> Insts;
    for (const Phi &P : BB.Phis) {
      LoweredInst LI;
      LI.Op = Opcode::Phi;
      LI.Dest = Slots.at(P.Result);
      for (const PhiIncoming &In : P.Incoming) {
        LI.Operands.push_back(lowerOperand(In.Value));
        LI.Blocks.push_back(blockId(In.Block));
      }
      Insts.push_back(std::move(LI));
    }
    for (const Instruction &I : BB.Body) {
      LoweredInst LI;
      LI.Op = I.Op;
      if (!I.Result.empty())
        LI.Dest = Slots.at(I.Result);
      if (!I.Memory.empty()) {
        auto MI = M.memoryIndex(I.Memory);
        if (!MI)
          throw UserError("unknown memory '@" + I.Memory + "'");
        LI.Memory = static_cast<std::int32_t>(*MI);
      }
      for (const Operand &O : I.Operands)
        LI.Operands.push_back(lowerOperand(O));
      Insts.push_back(std::move(LI));
    }
    LoweredInst T;
    T.Op = BB.Term.Op;
    if (T.Op != Opcode::Jmp)
      T.Operands.push_back(lowerOperand(BB.Term.Value));
    for (const std::string &S : BB.Term.successors())
      T.Blocks.push_back(blockId(S));
    if (T.Op == Opcode::Br)
      T.Site = SiteOf[B];
    Insts.push_back(std::move(T));
    L.NumPhis.push_back(static_cast<std::uint32_t>(BB.Phis.size()));
    L.Blocks.push_back(std::move(Insts));
  }
  return L;
}

namespace {

std::int64_t wrap(std::uint64_t V) { return static_cast<std::int64_t>(V); }

class Machine {
public:
  Machine(const Module &M, const LoweredFunction &L, const InterpretOptions &O)
      : M(M), L(L), Opts(O), Values(L.NumValues, 0) {}

  ExecResult run(const Inputs &In, const Function &F) {
    for (std::size_t I = 0; I < F.Params.size(); ++I) {
      auto It = In.Params.find(F.Params[I]);
      if (It == In.Params.end())
        throw UserError("missing value for parameter '" + F.Params[I] + "'");
      Values[L.ParamSlots[I]] = It->second;
    }
    for (const auto &[Name, Init] : In.Params)
      if (std::find(F.Params.begin(), F.Params.end(), Name) == F.Params.end())
        throw UserError("function '@" + F.Name + "' has no parameter '" +
                        Name + "'");
    for (const MemoryDecl &D : M.Memories)
      R.Memories.emplace_back(D.Length, 0);
    for (const auto &[Name, Init] : In.Memories) {
      auto MI = M.memoryIndex(Name);
      if (!MI)
        throw UserError("inputs initialize unknown memory '@" + Name + "'");
      std::vector<std::int64_t> Cells = Init.materialize();
      if (Cells.size() > M.Memories[*MI].Length)
        throw UserError("initializer for '@" + Name + "' has " +
                        std::to_string(Cells.size()) +
                        " cells but the memory holds " +
                        std::to_string(M.Memories[*MI].Length));
      std::copy(Cells.begin(), Cells.end(), R.Memories[*MI].begin());
    }

    std::uint32_t Block = 0;
    std::uint32_t Pred = 0;
    bool HavePred = false;
    while (true) {
      const auto &Insts = L.Blocks[Block];
      std::uint32_t NumPhis = L.NumPhis[Block];
      if (NumPhis) {
        // Phis read their inputs in parallel.
        PhiScratch.clear();
        for (std::uint32_t S = 0; S < NumPhis; ++S) {
          const LoweredInst &P = Insts[S];
          std::uint32_t Choice = 0;
          while (!HavePred || P.Blocks[Choice] != Pred)
            ++Choice;
          std::int64_t V = read(P.Operands[Choice]);
          step(Block, S, P, Choice, {&V, 1});
          PhiScratch.push_back(V);
        }
        for (std::uint32_t S = 0; S < NumPhis; ++S)
          Values[Insts[S].Dest] = PhiScratch[S];
      }
      for (std::uint32_t S = NumPhis; S + 1 < Insts.size(); ++S)
        execute(Block, S, Insts[S]);

      std::uint32_t TermSlot = static_cast<std::uint32_t>(Insts.size() - 1);
      const LoweredInst &T = Insts[TermSlot];
      switch (T.Op) {
      case Opcode::Ret: {
        std::int64_t V = read(T.Operands[0]);
        step(Block, TermSlot, T, 0, {&V, 1});
        R.ReturnValue = V;
        return std::move(R);
      }
      case Opcode::Jmp:
        step(Block, TermSlot, T, 0, {});
        Pred = Block;
        Block = T.Blocks[0];
        break;
      case Opcode::Br: {
        std::int64_t C = read(T.Operands[0]);
        bool Taken = C != 0;
        step(Block, TermSlot, T, Taken, {&C, 1});
        R.Branches.push_back({T.Site, Taken});
        Pred = Block;
        Block = Taken ? T.Blocks[0] : T.Blocks[1];
        break;
      }
      default:
        throw InternalError("bad terminator opcode");
      }
      HavePred = true;
    }
  }

private:
  std::int64_t read(const LoweredOperand &O) const {
    return O.Slot < 0 ? O.Imm : Values[O.Slot];
  }

  void step(std::uint32_t Block, std::uint32_t Slot, const LoweredInst &I,
            std::uint32_t Aux, std::span<const std::int64_t> Ops) {
    if (R.DynamicCount >= Opts.StepBudget)
      trap(TrapKind::StepBudget,
           "nontermination suspected: step budget of " +
               std::to_string(Opts.StepBudget) + " exhausted");
    ++R.DynamicCount;
    if (!Opts.RecordTrace)
      return;
    TraceEntry E;
    E.Block = Block;
    E.Slot = Slot;
    E.Op = I.Op;
    E.Aux = Aux;
    E.OperandBegin = static_cast<std::uint32_t>(R.TraceOperands.size());
    E.OperandCount = static_cast<std::uint32_t>(Ops.size());
    R.TraceOperands.insert(R.TraceOperands.end(), Ops.begin(), Ops.end());
    R.Trace.push_back(E);
  }

  [[noreturn]] void trap(TrapKind K, const std::string &Msg) {
    throw TrapError(K, Msg, std::move(R));
  }

  void execute(std::uint32_t Block, std::uint32_t Slot, const LoweredInst &I) {
    std::int64_t Ops[3] = {0, 0, 0};
    std::size_t N = I.Operands.size();
    for (std::size_t K = 0; K < N; ++K)
      Ops[K] = read(I.Operands[K]);
    auto U = [&](std::size_t K) { return static_cast<std::uint64_t>(Ops[K]); };
    std::int64_t Out = 0;
    switch (I.Op) {
    case Opcode::Add:
      Out = wrap(U(0) + U(1));
      break;
    case Opcode::Sub:
      Out = wrap(U(0) - U(1));
      break;
    case Opcode::Mul:
      Out = wrap(U(0) * U(1));
      break;
    case Opcode::Div:
    case Opcode::Rem:
      if (Ops[1] == 0)
        trap(TrapKind::DivideByZero,
             "division by zero in block " + std::to_string(Block));
      if (Ops[0] == INT64_MIN && Ops[1] == -1)
        Out = I.Op == Opcode::Div ? INT64_MIN : 0;
      else
        Out = I.Op == Opcode::Div ? Ops[0] / Ops[1] : Ops[0] % Ops[1];
      break;
    case Opcode::And:
      Out = Ops[0] & Ops[1];
      break;
    case Opcode::Or:
      Out = Ops[0] | Ops[1];
      break;
    case Opcode::Xor:
      Out = Ops[0] ^ Ops[1];
      break;
    case Opcode::Shl:
      Out = wrap(U(0) << (U(1) & 63));
      break;
    case Opcode::Shr:
      Out = Ops[0] >> (U(1) & 63);
      break;
    case Opcode::ICmpEq:
      Out = Ops[0] == Ops[1];
      break;
    case Opcode::ICmpNe:
      Out = Ops[0] != Ops[1];
      break;
    case Opcode::ICmpSlt:
      Out = Ops[0] < Ops[1];
      break;
    case Opcode::ICmpSle:
      Out = Ops[0] <= Ops[1];
      break;
    case Opcode::ICmpSgt:
      Out = Ops[0] > Ops[1];
      break;
    case Opcode::ICmpSge:
      Out = Ops[0] >= Ops[1];
      break;
    case Opcode::Select:
      Out = Ops[0] != 0 ? Ops[1] : Ops[2];
      break;
    case Opcode::Load:
    case Opcode::Store: {
      auto &Mem = R.Memories[I.Memory];
      if (Ops[0] < 0 || static_cast<std::uint64_t>(Ops[0]) >= Mem.size())
        trap(TrapKind::OutOfBounds,
             std::string(opcodeName(I.Op)) + " @" + M.Memories[I.Memory].Name +
                 "[" + std::to_string(Ops[0]) + "] is out of bounds");
      if (I.Op == Opcode::Load) {
        Out = Mem[Ops[0]];
      } else {
        step(Block, Slot, I, static_cast<std::uint32_t>(I.Memory), {Ops, N});
        Mem[Ops[0]] = Ops[1];
        return;
      }
      break;
    }
    default:
      throw InternalError("non-body opcode in block body");
    }
    step(Block, Slot, I, 0, {Ops, N});
    Values[I.Dest] = Out;
  }

  const Module &M;
  const LoweredFunction &L;
  const InterpretOptions &Opts;
  std::vector<std::int64_t> Values;
  std::vector<std::int64_t> PhiScratch;
  ExecResult R;
};

} // namespace

ExecResult predicator::interpret(const Module &M, std::string_view Fn,
                                 const Inputs &In,
                                 const InterpretOptions &Opts) {
  auto FI = M.functionIndex(Fn);
  if (!FI)
    throw UserError("no function named '@" + std::string(Fn) + "'");
  LoweredFunction L = lowerFunction(M, *FI);
  return Machine(M, L, Opts).run(In, M.Functions[*FI]);
}
