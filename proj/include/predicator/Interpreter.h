//===-- predicator/Interpreter.h - Reference interpreter --------*- C++ -*-===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Reference semantics for the IR. Besides the return value and final memory
// images the interpreter records the dynamic trace and the branch stream
// that drive the cycle-level simulator.
//
//===----------------------------------------------------------------------===//

#ifndef PREDICATOR_INTERPRETER_H
#define PREDICATOR_INTERPRETER_H

#include "predicator/Error.h"
#include "predicator/IR.h"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace predicator {

/// Initial contents of one memory: explicit cells, or `Length` cells drawn
/// uniformly from [Lo, Hi] with a seeded mt19937_64.
struct MemoryInit {
  std::vector<std::int64_t> Cells;
  std::optional<std::uint64_t> Seed;
  std::int64_t Lo = 0, Hi = 0;
  std::uint64_t Length = 0;

  std::vector<std::int64_t> materialize() const;

  friend bool operator==(const MemoryInit &, const MemoryInit &) = default;
};

struct Inputs {
  std::map<std::string, std::int64_t> Params;
  std::map<std::string, MemoryInit> Memories;

  friend bool operator==(const Inputs &, const Inputs &) = default;
};

/// Parses `param x = -5`, `mem a = [3,1,2]` and
/// `mem a = seed:42 uniform:[0,1000] len:256` lines. '#' starts a comment.
Inputs parseInputs(std::string_view Text);
std::string printInputs(const Inputs &In);

/// One dynamically executed instruction. `Slot` indexes phis, then body,
/// then the terminator of `Block`. `Aux` is the chosen incoming index for
/// phis and the taken flag for br.
struct TraceEntry {
  std::uint32_t Block = 0;
  std::uint32_t Slot = 0;
  Opcode Op = Opcode::Add;
  std::uint32_t Aux = 0;
  std::uint32_t OperandBegin = 0;
  std::uint32_t OperandCount = 0;
};

struct BranchEvent {
  std::uint32_t Site = 0;
  bool Taken = false;

  friend bool operator==(const BranchEvent &, const BranchEvent &) = default;
};

struct ExecResult {
  std::int64_t ReturnValue = 0;
  /// Final images, in Module::Memories order.
  std::vector<std::vector<std::int64_t>> Memories;
  std::vector<TraceEntry> Trace;
  /// Operand values referenced by TraceEntry::OperandBegin/OperandCount.
  std::vector<std::int64_t> TraceOperands;
  std::vector<BranchEvent> Branches;
  std::uint64_t DynamicCount = 0;

  /// (memory index, cell index, value) for every executed store, in order.
  std::vector<std::array<std::int64_t, 3>> storeSequence() const;
};

enum class TrapKind { DivideByZero, OutOfBounds, StepBudget };

std::string_view trapKindName(TrapKind K);

/// Execution stopped early. The partial result holds the trace prefix and
/// memory state up to, but excluding, the trapping instruction.
class TrapError : public UserError {
public:
  TrapError(TrapKind Kind, const std::string &Msg, ExecResult Partial)
      : UserError(Msg), Kind(Kind), Partial(std::move(Partial)) {}

  TrapKind kind() const { return Kind; }
  const ExecResult &partial() const { return Partial; }

private:
  TrapKind Kind;
  ExecResult Partial;
};

struct InterpretOptions {
  std::uint64_t StepBudget = 10'000'000;
  bool RecordTrace = true;
};

/// Runs function `Fn` of a validated module. Throws TrapError on division by
/// zero, out-of-bounds memory access, or step-budget exhaustion, and
/// UserError when inputs are incomplete.
ExecResult interpret(const Module &M, std::string_view Fn, const Inputs &In,
                     const InterpretOptions &Opts = {});

//===----------------------------------------------------------------------===//
// Lowered form shared by the interpreter and the simulator.
//===----------------------------------------------------------------------===//

/// Value slot or immediate; Slot < 0 means immediate.
struct LoweredOperand {
  std::int32_t Slot = -1;
  std::int64_t Imm = 0;
};

struct LoweredInst {
  Opcode Op = Opcode::Add;
  std::int32_t Dest = -1;
  std::int32_t Memory = -1;
  std::vector<LoweredOperand> Operands;
  /// Phi: predecessor block per incoming operand. Br/jmp: successors.
  std::vector<std::uint32_t> Blocks;
  /// Br only: module-wide branch site id.
  std::uint32_t Site = 0;
};

struct LoweredFunction {
  std::uint32_t NumValues = 0;
  std::vector<std::int32_t> ParamSlots;
  /// Per block: phis, body, terminator.
  std::vector<std::vector<LoweredInst>> Blocks;
  std::vector<std::uint32_t> NumPhis;
};

/// Requires a validated module.
LoweredFunction lowerFunction(const Module &M, std::size_t FnIndex);

} // namespace predicator

#endif // PREDICATOR_INTERPRETER_H
