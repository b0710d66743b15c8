//===-- IRTest.cpp - Parser, validator, CFG and interpreter ---------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "TestUtil.h"

#include "predicator/CFG.h"
#include "predicator/Validator.h"

#include <gtest/gtest.h>

using namespace predicator;
using namespace predicator::test;

namespace {

std::vector<std::string> rules(const Module &M) {
  std::vector<std::string> Out;
  for (const Diagnostic &D : validateModule(M))
    Out.push_back(D.Rule);
  return Out;
}

std::string errorOf(const std::string &Text) {
  try {
    parseModule(Text);
  } catch (const UserError &E) {
    return E.what();
  }
  return "";
}

std::vector<std::string> labels(const Function &F,
                                const std::vector<std::size_t> &Idx) {
  std::vector<std::string> Out;
  for (std::size_t I : Idx)
    Out.push_back(F.Blocks[I].Label);
  return Out;
}

} // namespace

TEST(Parser, AbsShape) {
  Module M = parseModule(AbsText);
  ASSERT_EQ(M.Functions.size(), 1u);
  EXPECT_EQ(M.Functions[0].Name, "abs");
  EXPECT_EQ(M.Functions[0].Blocks.size(), 3u);
  ASSERT_EQ(M.Memories.size(), 1u);
  EXPECT_EQ(M.Memories[0].Length, 256u);
  const BasicBlock &Join = M.Functions[0].Blocks[2];
  ASSERT_EQ(Join.Phis.size(), 1u);
  EXPECT_EQ(Join.Phis[0].Incoming.size(), 2u);
}

TEST(Parser, EmptyInput) {
  EXPECT_NE(errorOf("").find("expected 'func' or 'mem'"), std::string::npos);
  EXPECT_NE(errorOf("  # only a comment\n").find("expected 'func' or 'mem'"),
            std::string::npos);
}

TEST(Parser, DuplicateLabelNamed) {
  std::string Text = AbsText;
  Text.replace(Text.find("join:"), 5, "then:");
  std::string Err = errorOf(Text);
  EXPECT_NE(Err.find("then"), std::string::npos) << Err;
  EXPECT_NE(Err.find("duplicate"), std::string::npos) << Err;
}

TEST(Parser, UnknownOpcodeHasPosition) {
  std::string Err = errorOf("func @f(%x) {\nentry:\n  %y = frob %x, 1\n"
                            "  ret %y\n}\n");
  EXPECT_NE(Err.find("unknown opcode 'frob'"), std::string::npos) << Err;
  EXPECT_EQ(Err.rfind("3:", 0), 0u) << Err;
}

TEST(Parser, DuplicateFunctionAndMemory) {
  EXPECT_NE(errorOf("mem @a[2]\nmem @a[3]\n").find("duplicate"),
            std::string::npos);
  EXPECT_NE(errorOf("func @f() {\ne:\n ret 0\n}\nfunc @f() {\ne:\n ret 1\n}\n")
                .find("duplicate"),
            std::string::npos);
}

TEST(Parser, PhiAfterBodyRejected) {
  std::string Err = errorOf("func @f(%x) {\nentry:\n  %y = add %x, 1\n"
                            "  %p = phi [entry: %x]\n  ret %y\n}\n");
  EXPECT_NE(Err.find("phi must precede"), std::string::npos) << Err;
}

TEST(Printer, RoundTripAbs) {
  Module M = parseModule(AbsText);
  std::string Printed = printModule(M);
  EXPECT_EQ(parseModule(Printed), M);
  EXPECT_EQ(printModule(parseModule(Printed)), Printed);
}

TEST(Printer, RoundTripKernels) {
  for (const std::string &Name : kernelNames()) {
    Kernel K = loadKernel(Name);
    EXPECT_EQ(parseModule(printModule(K.M)), K.M) << Name;
  }
}

TEST(Validator, AbsClean) { EXPECT_TRUE(validateModule(parseModule(AbsText)).empty()); }

TEST(Validator, KernelsClean) {
  for (const std::string &Name : kernelNames())
    EXPECT_TRUE(validateModule(loadKernel(Name).M).empty()) << Name;
}

TEST(Validator, PhiEntryForNonPredecessor) {
  std::string Text = AbsText;
  Text.replace(Text.find("[entry: %x]"), 11, "[nowhere: %x]");
  Module M = parseModule(Text);
  auto Diags = validateModule(M);
  // The stale entry and the now-missing entry for 'entry' are one rule.
  ASSERT_FALSE(Diags.empty());
  for (const Diagnostic &D : Diags)
    EXPECT_EQ(D.Rule, "phi-pred-mismatch") << D.str();
}

TEST(Validator, PhiEntryForExtraBlockIsOneDiagnostic) {
  std::string Text = AbsText;
  Text.replace(Text.find("[entry: %x]"), 11, "[entry: %x], [ghost: %x]");
  auto Diags = validateModule(parseModule(Text));
  ASSERT_EQ(Diags.size(), 1u);
  EXPECT_EQ(Diags[0].Rule, "phi-pred-mismatch");
  EXPECT_EQ(Diags[0].Function, "abs");
  EXPECT_EQ(Diags[0].Block, "join");
}

TEST(Validator, DefBeforeUse) {
  Module M = parseModule("func @f(%x) {\nentry:\n  %u = add %t, 1\n"
                         "  %t = add %x, 1\n  ret %u\n}\n");
  EXPECT_EQ(rules(M), std::vector<std::string>{"def-before-use"});
}

TEST(Validator, UseNotDominated) {
  std::string Text = AbsText;
  Text.replace(Text.find("ret %r"), 6, "ret %t");
  EXPECT_EQ(rules(parseModule(Text)),
            std::vector<std::string>{"use-not-dominated"});
}

TEST(Validator, UnknownLabelAndUnreachable) {
  EXPECT_EQ(rules(parseModule("func @f() {\nentry:\n  jmp nope\n}\n")),
            std::vector<std::string>{"unknown-label"});
  EXPECT_EQ(rules(parseModule("func @f() {\nentry:\n  ret 0\nlost:\n  ret 1\n}\n")),
            std::vector<std::string>{"unreachable-block"});
}

TEST(Validator, MultipleDefinitionAndUnknownMemory) {
  EXPECT_EQ(rules(parseModule("func @f(%x) {\nentry:\n  %x = add 1, 2\n"
                              "  ret %x\n}\n")),
            std::vector<std::string>{"multiple-def"});
  EXPECT_EQ(rules(parseModule("func @f() {\nentry:\n  %v = load @m, 0\n"
                              "  ret %v\n}\n")),
            std::vector<std::string>{"unknown-memory"});
}

TEST(Validator, EntryWithPredecessor) {
  auto R = rules(parseModule("func @f() {\nentry:\n  jmp entry\n}\n"));
  EXPECT_NE(std::find(R.begin(), R.end(), "entry-pred"), R.end());
}

TEST(CFG, AbsDominators) {
  Module M = parseModule(AbsText);
  const Function &F = M.Functions[0];
  CfgInfo C = analyzeCFG(F);
  EXPECT_FALSE(C.IDom[0].has_value());
  EXPECT_EQ(C.IDom[1], std::optional<std::size_t>(0));
  EXPECT_EQ(C.IDom[2], std::optional<std::size_t>(0));
  // Children in block-list order: then before join.
  EXPECT_EQ(labels(F, C.DomPostOrder),
            (std::vector<std::string>{"then", "join", "entry"}));
  for (unsigned D : C.LoopDepth)
    EXPECT_EQ(D, 0u);
}

TEST(CFG, StraightLine) {
  Module M = parseModule("func @f() {\nentry:\n  ret 0\n}\n");
  CfgInfo C = analyzeCFG(M.Functions[0]);
  EXPECT_EQ(C.DomPostOrder, std::vector<std::size_t>{0});
  EXPECT_EQ(C.LoopDepth, std::vector<unsigned>{0});
}

TEST(CFG, SelfLoop) {
  Module M = parseModule("func @f(%n) {\nentry:\n  jmp L\nL:\n"
                         "  %i = phi [entry: 0], [L: %j]\n  %j = add %i, 1\n"
                         "  %c = icmp.slt %j, %n\n  br %c, L, out\nout:\n"
                         "  ret %j\n}\n");
  const Function &F = M.Functions[0];
  CfgInfo C = analyzeCFG(F);
  EXPECT_EQ(C.LoopDepth[*F.blockIndex("entry")], 0u);
  EXPECT_EQ(C.LoopDepth[*F.blockIndex("L")], 1u);
  EXPECT_EQ(C.LoopDepth[*F.blockIndex("out")], 0u);
}

TEST(CFG, NestedLoopDepths) {
  Kernel K = loadKernel("sortcmp");
  const Function &F = K.M.Functions[0];
  CfgInfo C = analyzeCFG(F);
  EXPECT_EQ(C.LoopDepth[*F.blockIndex("outer")], 1u);
  EXPECT_EQ(C.LoopDepth[*F.blockIndex("inner")], 2u);
  EXPECT_EQ(C.LoopDepth[*F.blockIndex("swap")], 2u);
  EXPECT_EQ(C.LoopDepth[*F.blockIndex("onext")], 1u);
  EXPECT_EQ(C.LoopDepth[*F.blockIndex("done")], 0u);
}

TEST(CFG, PostOrderCoversEveryBlockOnce) {
  for (const std::string &Name : kernelNames()) {
    Kernel K = loadKernel(Name);
    for (const Function &F : K.M.Functions) {
      CfgInfo C = analyzeCFG(F);
      std::vector<std::size_t> Sorted = C.DomPostOrder;
      std::sort(Sorted.begin(), Sorted.end());
      std::vector<std::size_t> All(F.Blocks.size());
      for (std::size_t I = 0; I < All.size(); ++I)
        All[I] = I;
      EXPECT_EQ(Sorted, All) << Name;
      EXPECT_EQ(C.DomPostOrder.back(), 0u) << Name;
      // A child precedes its idom.
      for (std::size_t I = 0; I < C.DomPostOrder.size(); ++I)
        if (auto D = C.IDom[C.DomPostOrder[I]]) {
          auto Pos = std::find(C.DomPostOrder.begin(), C.DomPostOrder.end(), *D) -
                     C.DomPostOrder.begin();
          EXPECT_GT(static_cast<std::size_t>(Pos), I) << Name;
        }
    }
  }
}

TEST(CFG, UsesDominatedByDefs) {
  // Every in-function definition dominates each use block.
  for (const std::string &Name : kernelNames()) {
    Kernel K = loadKernel(Name);
    for (const Function &F : K.M.Functions) {
      CfgInfo C = analyzeCFG(F);
      std::map<std::string, std::size_t> Def;
      for (std::size_t B = 0; B < F.Blocks.size(); ++B) {
        for (const Phi &P : F.Blocks[B].Phis)
          Def[P.Result] = B;
        for (const Instruction &I : F.Blocks[B].Body)
          if (!I.Result.empty())
            Def[I.Result] = B;
      }
      for (std::size_t B = 0; B < F.Blocks.size(); ++B)
        for (const Instruction &I : F.Blocks[B].Body)
          for (const Operand &O : I.Operands)
            if (!O.IsImm && Def.count(O.Name))
              EXPECT_TRUE(C.dominates(Def[O.Name], B)) << Name << " " << O.Name;
    }
  }
}

TEST(CFG, BranchSiteNumbering) {
  Kernel K = loadKernel("statemach");
  auto Sites = numberBranchSites(K.M);
  const Function &F = K.M.Functions[0];
  std::vector<std::string> Heads;
  for (const BranchSite &S : Sites)
    Heads.push_back(F.Blocks[S.Block].Label);
  EXPECT_EQ(Heads, (std::vector<std::string>{"done", "step", "merge", "loop"}));
}

TEST(CFG, UnreachableRejected) {
  Module M = parseModule("func @f() {\nentry:\n  ret 0\nlost:\n  ret 1\n}\n");
  EXPECT_THROW(analyzeCFG(M.Functions[0]), UserError);
}

TEST(Interpreter, AbsNegative) {
  Module M = parseModule(AbsText);
  ExecResult R = interpret(M, "abs", parseInputs("param x = -5\n"));
  EXPECT_EQ(R.ReturnValue, 5);
  EXPECT_EQ(R.Branches, (std::vector<BranchEvent>{{0, true}}));
}

TEST(Interpreter, AbsPositive) {
  Module M = parseModule(AbsText);
  ExecResult R = interpret(M, "abs", parseInputs("param x = 7\n"));
  EXPECT_EQ(R.ReturnValue, 7);
  EXPECT_EQ(R.Branches, (std::vector<BranchEvent>{{0, false}}));
}

TEST(Interpreter, AbsZeroCountsFourInstructions) {
  Module M = parseModule(AbsText);
  ExecResult R = interpret(M, "abs", parseInputs("param x = 0\n"));
  EXPECT_EQ(R.ReturnValue, 0);
  EXPECT_EQ(R.DynamicCount, 4u);
  ASSERT_EQ(R.Trace.size(), 4u);
  EXPECT_EQ(R.Trace[0].Op, Opcode::ICmpSlt);
  EXPECT_EQ(R.Trace[1].Op, Opcode::Br);
  EXPECT_EQ(R.Trace[2].Op, Opcode::Phi);
  EXPECT_EQ(R.Trace[3].Op, Opcode::Ret);
}

TEST(Interpreter, WrappingArithmetic) {
  Module M = parseModule("func @f(%x) {\nentry:\n  %y = add %x, 1\n"
                         "  %z = mul %y, 2\n  ret %z\n}\n");
  ExecResult R = interpret(M, "f", parseInputs("param x = 9223372036854775807\n"));
  EXPECT_EQ(R.ReturnValue, 0);
}

TEST(Interpreter, SelectAndCompares) {
  Module M = parseModule("func @f(%a, %b) {\nentry:\n  %c = icmp.sle %a, %b\n"
                         "  %s = select %c, 10, 20\n  %d = icmp.ne %a, %b\n"
                         "  %t = add %s, %d\n  ret %t\n}\n");
  EXPECT_EQ(interpret(M, "f", parseInputs("param a = 1\nparam b = 2\n")).ReturnValue, 11);
  EXPECT_EQ(interpret(M, "f", parseInputs("param a = 3\nparam b = 3\n")).ReturnValue, 10);
  EXPECT_EQ(interpret(M, "f", parseInputs("param a = 4\nparam b = 3\n")).ReturnValue, 21);
}

TEST(Interpreter, DivideByZeroTraps) {
  Module M = parseModule("func @f(%x) {\nentry:\n  %y = div 10, %x\n  ret %y\n}\n");
  EXPECT_EQ(interpret(M, "f", parseInputs("param x = 3\n")).ReturnValue, 3);
  try {
    interpret(M, "f", parseInputs("param x = 0\n"));
    FAIL() << "expected a trap";
  } catch (const TrapError &E) {
    EXPECT_EQ(E.kind(), TrapKind::DivideByZero);
  }
}

TEST(Interpreter, OutOfBoundsTrapsWithPartialState) {
  Module M = parseModule("mem @m[2]\nfunc @f(%i) {\nentry:\n"
                         "  store @m, 0, 7\n  %v = load @m, %i\n  ret %v\n}\n");
  try {
    interpret(M, "f", parseInputs("param i = 2\n"));
    FAIL() << "expected a trap";
  } catch (const TrapError &E) {
    EXPECT_EQ(E.kind(), TrapKind::OutOfBounds);
    EXPECT_EQ(E.partial().Memories[0][0], 7);
  }
}

TEST(Interpreter, StepBudget) {
  Module M = parseModule("func @f() {\nentry:\n  jmp L\nL:\n  jmp L\n}\n");
  try {
    interpret(M, "f", {});
    FAIL() << "expected a trap";
  } catch (const TrapError &E) {
    EXPECT_EQ(E.kind(), TrapKind::StepBudget);
    EXPECT_NE(std::string(E.what()).find("nontermination suspected"),
              std::string::npos);
  }
}

TEST(Interpreter, MissingParamIsUserError) {
  Module M = parseModule(AbsText);
  EXPECT_THROW(interpret(M, "abs", {}), UserError);
}

TEST(Interpreter, Deterministic) {
  for (const std::string &Name : kernelNames()) {
    Kernel K = loadKernel(Name);
    ExecResult A = interpret(K.M, K.Entry, K.In);
    ExecResult B = interpret(K.M, K.Entry, K.In);
    EXPECT_EQ(A.ReturnValue, B.ReturnValue);
    EXPECT_EQ(A.Memories, B.Memories);
    EXPECT_EQ(A.Branches, B.Branches);
    EXPECT_EQ(A.DynamicCount, B.DynamicCount);
    EXPECT_EQ(A.TraceOperands, B.TraceOperands);
  }
}

TEST(Interpreter, SortcmpSorts) {
  Kernel K = loadKernel("sortcmp");
  ExecResult R = interpret(K.M, K.Entry, K.In);
  const auto &A = R.Memories[0];
  EXPECT_TRUE(std::is_sorted(A.begin(), A.end()));
}

TEST(Inputs, ParseForms) {
  Inputs In = parseInputs("# workload\nparam x = -5\nmem a = [3,1,2]\n"
                          "mem b = seed:42 uniform:[0,1000] len:256\n");
  EXPECT_EQ(In.Params.at("x"), -5);
  EXPECT_EQ(In.Memories.at("a").Cells, (std::vector<std::int64_t>{3, 1, 2}));
  const MemoryInit &B = In.Memories.at("b");
  EXPECT_EQ(B.Seed, std::optional<std::uint64_t>(42));
  std::vector<std::int64_t> Cells = B.materialize();
  ASSERT_EQ(Cells.size(), 256u);
  for (std::int64_t V : Cells) {
    EXPECT_GE(V, 0);
    EXPECT_LE(V, 1000);
  }
  EXPECT_EQ(Cells, B.materialize());
  EXPECT_EQ(parseInputs(printInputs(In)), In);
}

TEST(Inputs, InitializerLongerThanMemoryRejected) {
  Module M = parseModule("mem @a[2]\nfunc @f() {\nentry:\n  ret 0\n}\n");
  EXPECT_THROW(interpret(M, "f", parseInputs("mem a = [1,2,3]\n")), UserError);
}
