//===-- IR.cpp - IR helpers and printer -----------------------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "predicator/IR.h"

#include <array>
#include <sstream>

using namespace predicator;

namespace {
constexpr std::array<std::string_view, NumOpcodes> OpcodeNames = {
    "add",      "sub",      "mul",      "div",      "rem",      "and",
    "or",       "xor",      "shl",      "shr",      "icmp.eq",  "icmp.ne",
    "icmp.slt", "icmp.sle", "icmp.sgt", "icmp.sge", "select",   "load",
    "store",    "phi",      "br",       "jmp",      "ret"};

void printOperand(std::ostream &OS, const Operand &O) {
  if (O.IsImm)
    OS << O.Imm;
  else
    OS << '%' << O.Name;
}
} // namespace

std::string_view predicator::opcodeName(Opcode Op) {
  return OpcodeNames[static_cast<std::size_t>(Op)];
}

std::optional<Opcode> predicator::parseAnyOpcode(std::string_view Name) {
  for (std::size_t I = 0; I < NumOpcodes; ++I)
    if (OpcodeNames[I] == Name)
      return static_cast<Opcode>(I);
  return std::nullopt;
}

std::optional<Opcode> predicator::parseBodyOpcode(std::string_view Name) {
  auto Op = parseAnyOpcode(Name);
  if (!Op || *Op >= Opcode::Phi)
    return std::nullopt;
  return Op;
}

unsigned predicator::operandArity(Opcode Op) {
  switch (Op) {
  case Opcode::Select:
    return 3;
  case Opcode::Load:
  case Opcode::Ret:
  case Opcode::Br:
    return 1;
  case Opcode::Jmp:
  case Opcode::Phi:
    return 0;
  default:
    return 2; // Binary ops, compares, store (index, value).
  }
}

bool predicator::isBinaryArith(Opcode Op) {
  return Op >= Opcode::Add && Op <= Opcode::Shr;
}

bool predicator::isCompare(Opcode Op) {
  return Op >= Opcode::ICmpEq && Op <= Opcode::ICmpSge;
}

const Operand *Phi::incomingFor(std::string_view Block) const {
  for (const PhiIncoming &In : Incoming)
    if (In.Block == Block)
      return &In.Value;
  return nullptr;
}

std::vector<std::string> Terminator::successors() const {
  switch (Op) {
  case Opcode::Br:
    return {Target, FalseTarget};
  case Opcode::Jmp:
    return {Target};
  default:
    return {};
  }
}

std::optional<std::size_t> Function::blockIndex(std::string_view Label) const {
  for (std::size_t I = 0; I < Blocks.size(); ++I)
    if (Blocks[I].Label == Label)
      return I;
  return std::nullopt;
}

const BasicBlock *Function::block(std::string_view Label) const {
  auto I = blockIndex(Label);
  return I ? &Blocks[*I] : nullptr;
}

BasicBlock *Function::block(std::string_view Label) {
  auto I = blockIndex(Label);
  return I ? &Blocks[*I] : nullptr;
}

const Function *Module::function(std::string_view Name) const {
  auto I = functionIndex(Name);
  return I ? &Functions[*I] : nullptr;
}

std::optional<std::size_t> Module::functionIndex(std::string_view Name) const {
  for (std::size_t I = 0; I < Functions.size(); ++I)
    if (Functions[I].Name == Name)
      return I;
  return std::nullopt;
}

std::optional<std::size_t> Module::memoryIndex(std::string_view Name) const {
  for (std::size_t I = 0; I < Memories.size(); ++I)
    if (Memories[I].Name == Name)
      return I;
  return std::nullopt;
}

static void printFunctionTo(std::ostream &OS, const Function &F) {
  OS << "func @" << F.Name << '(';
  for (std::size_t I = 0; I < F.Params.size(); ++I)
    OS << (I ? ", %" : "%") << F.Params[I];
  OS << ") {\n";
  for (const BasicBlock &BB : F.Blocks) {
    OS << BB.Label << ":\n";
    for (const Phi &P : BB.Phis) {
      OS << "  %" << P.Result << " = phi ";
      for (std::size_t I = 0; I < P.Incoming.size(); ++I) {
        OS << (I ? ", [" : "[") << P.Incoming[I].Block << ": ";
        printOperand(OS, P.Incoming[I].Value);
        OS << ']';
      }
      OS << '\n';
    }
    for (const Instruction &I : BB.Body) {
      OS << "  ";
      if (!I.Result.empty())
        OS << '%' << I.Result << " = ";
      OS << opcodeName(I.Op) << ' ';
      bool First = true;
      if (!I.Memory.empty()) {
        OS << '@' << I.Memory;
        First = false;
      }
      for (const Operand &O : I.Operands) {
        if (!First)
          OS << ", ";
        printOperand(OS, O);
        First = false;
      }
      OS << '\n';
    }
    const Terminator &T = BB.Term;
    OS << "  " << opcodeName(T.Op);
    if (T.Op == Opcode::Br) {
      OS << ' ';
      printOperand(OS, T.Value);
      OS << ", " << T.Target << ", " << T.FalseTarget;
    } else if (T.Op == Opcode::Jmp) {
      OS << ' ' << T.Target;
    } else {
      OS << ' ';
      printOperand(OS, T.Value);
    }
    OS << '\n';
  }
  OS << "}\n";
}

std::string predicator::printFunction(const Function &F) {
  std::ostringstream OS;
  printFunctionTo(OS, F);
  return OS.str();
}

std::string predicator::printModule(const Module &M) {
  std::ostringstream OS;
  OS << M;
  return OS.str();
}

std::ostream &predicator::operator<<(std::ostream &OS, const Module &M) {
  for (const MemoryDecl &Mem : M.Memories)
    OS << "mem @" << Mem.Name << '[' << Mem.Length << "]\n";
  for (std::size_t I = 0; I < M.Functions.size(); ++I) {
    if (I || !M.Memories.empty())
      OS << '\n';
    printFunctionTo(OS, M.Functions[I]);
  }
  return OS;
}
