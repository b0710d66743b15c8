//===-- Validator.cpp - IR well-formedness --------------------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "predicator/Validator.h"
#include "predicator/CFG.h"
#include "predicator/Error.h"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

using namespace predicator;

std::string Diagnostic::str() const {
  std::ostringstream OS;
  OS << '@' << Function;
  if (!Block.empty())
    OS << ':' << Block;
  if (Slot)
    OS << '#' << *Slot;
  OS << ": [" << Rule << "] " << Message;
  return OS.str();
}

namespace {

struct DefSite {
  std::size_t Block;
  /// Params are defined before slot 0 of the entry block.
  std::optional<std::size_t> Slot;
};

class FunctionValidator {
public:
  FunctionValidator(const Module &M, const Function &F,
                    std::vector<Diagnostic> &Out)
      : M(M), F(F), Out(Out) {}

  void run() {
    if (F.Blocks.empty()) {
      report("", std::nullopt, "empty-function", "function has no blocks");
      return;
    }
    checkLabels();
    Cfg = computeCfg(F);
    if (!Cfg.Preds[0].empty())
      report(F.Blocks[0].Label, std::nullopt, "entry-pred",
             "entry block must not have predecessors");
    for (std::size_t B = 0; B < F.Blocks.size(); ++B)
      if (!Cfg.Reachable[B])
        report(F.Blocks[B].Label, std::nullopt, "unreachable-block",
               "block '" + F.Blocks[B].Label + "' is unreachable");
    collectDefs();
    for (std::size_t B = 0; B < F.Blocks.size(); ++B)
      checkBlock(B);
  }

private:
  void report(const std::string &Block, std::optional<std::size_t> Slot,
              std::string Rule, std::string Msg) {
    Out.push_back({F.Name, Block, Slot, std::move(Rule), std::move(Msg)});
  }

  void checkLabels() {
    std::set<std::string> Seen;
    for (const BasicBlock &BB : F.Blocks) {
      if (!Seen.insert(BB.Label).second)
        report(BB.Label, std::nullopt, "dup-label",
               "duplicate label '" + BB.Label + "'");
      const Terminator &T = BB.Term;
      if (T.Op != Opcode::Br && T.Op != Opcode::Jmp && T.Op != Opcode::Ret) {
        report(BB.Label, BB.size() - 1, "bad-terminator",
               "block must end in br, jmp or ret");
        continue;
      }
      for (const std::string &S : T.successors())
        if (!F.block(S))
          report(BB.Label, BB.size() - 1, "unknown-label",
                 "unknown label '" + S + "'");
    }
  }

  void define(const std::string &Name, DefSite Site, const std::string &Block,
              std::optional<std::size_t> Slot) {
    if (!Defs.emplace(Name, Site).second)
      report(Block, Slot, "multiple-def",
             "value '%" + Name + "' defined more than once");
  }

  void collectDefs() {
    for (const std::string &P : F.Params)
      define(P, {0, std::nullopt}, F.Blocks[0].Label, std::nullopt);
    for (std::size_t B = 0; B < F.Blocks.size(); ++B) {
      const BasicBlock &BB = F.Blocks[B];
      std::size_t Slot = 0;
      for (const Phi &P : BB.Phis) {
        define(P.Result, {B, Slot}, BB.Label, Slot);
        ++Slot;
      }
      for (const Instruction &I : BB.Body) {
        if (I.Op == Opcode::Store) {
          if (!I.Result.empty())
            report(BB.Label, Slot, "arity", "store produces no value");
        } else if (I.Result.empty()) {
          report(BB.Label, Slot, "arity",
                 std::string(opcodeName(I.Op)) + " requires a result");
        } else {
          define(I.Result, {B, Slot}, BB.Label, Slot);
        }
        ++Slot;
      }
    }
  }

  void checkUse(const Operand &O, std::size_t B, std::size_t Slot) {
    if (O.IsImm || !Cfg.Reachable[B])
      return;
    const std::string &Label = F.Blocks[B].Label;
    auto It = Defs.find(O.Name);
    if (It == Defs.end()) {
      report(Label, Slot, "undefined-value",
             "use of undefined value '%" + O.Name + "'");
      return;
    }
    const DefSite &D = It->second;
    if (D.Block == B) {
      if (D.Slot && *D.Slot >= Slot)
        report(Label, Slot, "def-before-use",
               "value '%" + O.Name + "' used before its definition");
      return;
    }
    if (!Cfg.dominates(D.Block, B))
      report(Label, Slot, "use-not-dominated",
             "definition of '%" + O.Name + "' does not dominate its use");
  }

  void checkPhiUse(const Operand &O, std::size_t Pred, std::size_t B,
                   std::size_t Slot) {
    if (O.IsImm || !Cfg.Reachable[B] || !Cfg.Reachable[Pred])
      return;
    const std::string &Label = F.Blocks[B].Label;
    auto It = Defs.find(O.Name);
    if (It == Defs.end()) {
      report(Label, Slot, "undefined-value",
             "use of undefined value '%" + O.Name + "'");
      return;
    }
    if (It->second.Block != Pred && !Cfg.dominates(It->second.Block, Pred))
      report(Label, Slot, "use-not-dominated",
             "definition of '%" + O.Name +
                 "' does not dominate the incoming edge from '" +
                 F.Blocks[Pred].Label + "'");
  }

  void checkBlock(std::size_t B) {
    const BasicBlock &BB = F.Blocks[B];
    std::size_t Slot = 0;
    for (const Phi &P : BB.Phis) {
      if (Cfg.Preds[B].empty())
        report(BB.Label, Slot, "phi-pred-mismatch",
               "phi '%" + P.Result + "' in a block without predecessors");
      std::set<std::size_t> Seen;
      for (const PhiIncoming &In : P.Incoming) {
        auto PI = F.blockIndex(In.Block);
        const auto &Preds = Cfg.Preds[B];
        if (!PI || std::find(Preds.begin(), Preds.end(), *PI) == Preds.end()) {
          report(BB.Label, Slot, "phi-pred-mismatch",
                 "phi '%" + P.Result + "' has an entry for '" + In.Block +
                     "', which is not a predecessor");
          continue;
        }
        if (!Seen.insert(*PI).second) {
          report(BB.Label, Slot, "phi-pred-mismatch",
                 "phi '%" + P.Result + "' has duplicate entries for '" +
                     In.Block + "'");
          continue;
        }
        checkPhiUse(In.Value, *PI, B, Slot);
      }
      for (std::size_t Pred : Cfg.Preds[B])
        if (!Seen.count(Pred) && Cfg.Reachable[Pred])
          report(BB.Label, Slot, "phi-pred-mismatch",
                 "phi '%" + P.Result + "' lacks an entry for predecessor '" +
                     F.Blocks[Pred].Label + "'");
      ++Slot;
    }
    for (const Instruction &I : BB.Body) {
      if (I.Op >= Opcode::Phi) {
        report(BB.Label, Slot, "bad-opcode",
               std::string(opcodeName(I.Op)) + " is not a body instruction");
      } else if (I.Operands.size() != operandArity(I.Op)) {
        report(BB.Label, Slot, "arity",
               std::string(opcodeName(I.Op)) + " expects " +
                   std::to_string(operandArity(I.Op)) + " operands");
      }
      bool IsMem = I.Op == Opcode::Load || I.Op == Opcode::Store;
      if (IsMem && !M.memoryIndex(I.Memory))
        report(BB.Label, Slot, "unknown-memory",
               "unknown memory '@" + I.Memory + "'");
      if (!IsMem && !I.Memory.empty())
        report(BB.Label, Slot, "arity",
               std::string(opcodeName(I.Op)) + " takes no memory operand");
      for (const Operand &O : I.Operands)
        checkUse(O, B, Slot);
      ++Slot;
    }
    if (BB.Term.Op == Opcode::Br || BB.Term.Op == Opcode::Ret)
      checkUse(BB.Term.Value, B, Slot);
  }

  const Module &M;
  const Function &F;
  std::vector<Diagnostic> &Out;
  CfgInfo Cfg;
  std::map<std::string, DefSite> Defs;
};

} // namespace

std::vector<Diagnostic> predicator::validateModule(const Module &M) {
  std::vector<Diagnostic> Out;
  std::set<std::string> Funcs, Mems;
  for (const MemoryDecl &D : M.Memories)
    if (!Mems.insert(D.Name).second)
      Out.push_back({"", "", std::nullopt, "dup-memory",
                     "duplicate memory '@" + D.Name + "'"});
  for (const Function &F : M.Functions) {
    if (!Funcs.insert(F.Name).second)
      Out.push_back({F.Name, "", std::nullopt, "dup-function",
                     "duplicate function '@" + F.Name + "'"});
    FunctionValidator(M, F, Out).run();
  }
  return Out;
}

void predicator::requireValid(const Module &M) {
  auto Diags = validateModule(M);
  if (Diags.empty())
    return;
  std::string Msg = "invalid module:";
  for (const Diagnostic &D : Diags)
    Msg += "\n  " + D.str();
  throw UserError(Msg);
}
