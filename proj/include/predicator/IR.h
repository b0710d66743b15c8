//===-- predicator/IR.h - Minimal SSA IR ------------------------*- C++ -*-===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// A deliberately small SSA IR: one 64-bit signed integer type, named flat
// memories, phis at block heads, and exactly one terminator per block.
// Types here are plain values; analyses and transforms take them by const
// reference and return new values.
//
//===----------------------------------------------------------------------===//

#ifndef PREDICATOR_IR_H
#define PREDICATOR_IR_H

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace predicator {

enum class Opcode : std::uint8_t {
  Add,
  Sub,
  Mul,
  Div,
  Rem,
  And,
  Or,
  Xor,
  Shl,
  Shr,
  ICmpEq,
  ICmpNe,
  ICmpSlt,
  ICmpSle,
  ICmpSgt,
  ICmpSge,
  Select,
  Load,
  Store,
  // Non-body opcodes; used by traces and latency tables.
  Phi,
  Br,
  Jmp,
  Ret,
};

inline constexpr std::size_t NumOpcodes = static_cast<std::size_t>(Opcode::Ret) + 1;

std::string_view opcodeName(Opcode Op);
/// Parses a body opcode mnemonic ("add", "icmp.slt", ...).
std::optional<Opcode> parseBodyOpcode(std::string_view Name);
/// Parses any mnemonic, including phi/br/jmp/ret.
std::optional<Opcode> parseAnyOpcode(std::string_view Name);

/// Number of value operands a body opcode takes. Load takes the index, store
/// takes index and stored value; the memory name is carried separately.
unsigned operandArity(Opcode Op);
bool isBinaryArith(Opcode Op);
bool isCompare(Opcode Op);

/// A value reference (%name) or a signed 64-bit immediate.
struct Operand {
  bool IsImm = true;
  std::int64_t Imm = 0;
  std::string Name;

  static Operand value(std::string Name) { return {false, 0, std::move(Name)}; }
  static Operand imm(std::int64_t V) { return {true, V, {}}; }

  bool isValue() const { return !IsImm; }

  friend bool operator==(const Operand &, const Operand &) = default;
};

struct Instruction {
  std::string Result; ///< Empty for store.
  Opcode Op = Opcode::Add;
  std::vector<Operand> Operands;
  std::string Memory; ///< Load/store only.

  friend bool operator==(const Instruction &, const Instruction &) = default;
};

struct PhiIncoming {
  std::string Block;
  Operand Value;

  friend bool operator==(const PhiIncoming &, const PhiIncoming &) = default;
};

struct Phi {
  std::string Result;
  std::vector<PhiIncoming> Incoming;

  const Operand *incomingFor(std::string_view Block) const;

  friend bool operator==(const Phi &, const Phi &) = default;
};

/// br / jmp / ret. `Value` is the br condition or the returned value.
struct Terminator {
  Opcode Op = Opcode::Ret;
  Operand Value;
  std::string Target;      ///< jmp target, or br true target.
  std::string FalseTarget; ///< br only.

  static Terminator br(Operand Cond, std::string T, std::string F) {
    return {Opcode::Br, std::move(Cond), std::move(T), std::move(F)};
  }
  static Terminator jmp(std::string T) {
    return {Opcode::Jmp, Operand::imm(0), std::move(T), {}};
  }
  static Terminator ret(Operand V) { return {Opcode::Ret, std::move(V), {}, {}}; }

  std::vector<std::string> successors() const;

  friend bool operator==(const Terminator &, const Terminator &) = default;
};

struct BasicBlock {
  std::string Label;
  std::vector<Phi> Phis;
  std::vector<Instruction> Body;
  Terminator Term;

  /// Phis + body + terminator.
  std::size_t size() const { return Phis.size() + Body.size() + 1; }

  friend bool operator==(const BasicBlock &, const BasicBlock &) = default;
};

struct Function {
  std::string Name;
  std::vector<std::string> Params;
  std::vector<BasicBlock> Blocks; ///< Blocks.front() is the entry.

  std::optional<std::size_t> blockIndex(std::string_view Label) const;
  const BasicBlock *block(std::string_view Label) const;
  BasicBlock *block(std::string_view Label);

  friend bool operator==(const Function &, const Function &) = default;
};

struct MemoryDecl {
  std::string Name;
  std::uint64_t Length = 0;

  friend bool operator==(const MemoryDecl &, const MemoryDecl &) = default;
};

struct Module {
  std::vector<MemoryDecl> Memories;
  std::vector<Function> Functions;

  const Function *function(std::string_view Name) const;
  std::optional<std::size_t> functionIndex(std::string_view Name) const;
  std::optional<std::size_t> memoryIndex(std::string_view Name) const;

  friend bool operator==(const Module &, const Module &) = default;
};

/// Canonical text form; parseModule(printModule(M)) == M.
std::string printModule(const Module &M);
std::string printFunction(const Function &F);
std::ostream &operator<<(std::ostream &OS, const Module &M);

} // namespace predicator

#endif // PREDICATOR_IR_H
