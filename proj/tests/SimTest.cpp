//===-- SimTest.cpp - Cycle model and branch predictors -------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "TestUtil.h"

#include "predicator/IfConversion.h"
#include "predicator/MachineModel.h"
#include "predicator/Simulator.h"

#include <gtest/gtest.h>

using namespace predicator;
using namespace predicator::test;

namespace {

Inputs absInput(std::int64_t X) {
  Inputs In;
  In.Params["x"] = X;
  return In;
}

MachineModel withPredictor(PredictorKind K, unsigned Penalty = 14) {
  MachineModel MM;
  MM.Predictor = K;
  MM.MispredictPenalty = Penalty;
  return MM;
}

constexpr const char *AlternatingText = R"(func @main(%n) {
entry:
  jmp loop
loop:
  %i = phi [entry: 0], [latch: %i1]
  %acc = phi [entry: 0], [latch: %acc2]
  %odd = and %i, 1
  %c = icmp.eq %odd, 0
  br %c, bump, latch
bump:
  %b = add %acc, 3
  jmp latch
latch:
  %acc2 = phi [bump: %b], [loop: %acc]
  %i1 = add %i, 1
  %more = icmp.slt %i1, %n
  br %more, loop, done
done:
  ret %acc2
}
)";

} // namespace

TEST(Predictor, TwoBitAutomaton) {
  PredictorState P(1);
  EXPECT_EQ(P.counter(0), 1);
  EXPECT_FALSE(P.predictAndUpdate(0, true));
  EXPECT_EQ(P.counter(0), 2);
  EXPECT_TRUE(P.predictAndUpdate(0, true));
  EXPECT_EQ(P.counter(0), 3);
  EXPECT_TRUE(P.predictAndUpdate(0, true));
  EXPECT_EQ(P.counter(0), 3);
  EXPECT_TRUE(P.predictAndUpdate(0, false));
  EXPECT_EQ(P.counter(0), 2);
  EXPECT_TRUE(P.predictAndUpdate(0, false));
  EXPECT_EQ(P.counter(0), 1);
  EXPECT_FALSE(P.predictAndUpdate(0, false));
  EXPECT_EQ(P.counter(0), 0);
  EXPECT_FALSE(P.predictAndUpdate(0, false));
  EXPECT_EQ(P.counter(0), 0);
}

TEST(Predictor, CounterRange) {
  PredictorState P(2);
  P.setCounter(1, 3);
  EXPECT_EQ(P.counter(1), 3);
  EXPECT_EQ(P.counter(0), 1);
  EXPECT_THROW(P.setCounter(0, 4), UserError);
}

TEST(Simulator, IssueWidthBoundsThroughput) {
  Module M = parseModule("func @f(%a) {\nentry:\n  %x1 = add %a, 1\n"
                         "  %x2 = add %a, 2\n  %x3 = add %a, 3\n"
                         "  %x4 = add %a, 4\n  ret %x1\n}\n");
  Inputs In;
  In.Params["a"] = 0;
  MachineModel MM;
  EXPECT_EQ(simulate(M, "f", In, MM).Cycles, 2u);
  MM.IssueWidth = 2;
  // Two cycles of adds, then ret at 2.
  EXPECT_EQ(simulate(M, "f", In, MM).Cycles, 3u);
  MM.IssueWidth = 1;
  EXPECT_EQ(simulate(M, "f", In, MM).Cycles, 5u);
}

TEST(Simulator, DependentChainLatency) {
  Module M = parseModule("func @f(%a) {\nentry:\n  %x = mul %a, 3\n"
                         "  %y = div %x, 2\n  %z = add %y, 1\n  ret %z\n}\n");
  Inputs In;
  In.Params["a"] = 5;
  // mul 0..3, div 3..15, add 15..16, ret 16..17.
  EXPECT_EQ(simulate(M, "f", In, MachineModel{}).Cycles, 17u);
}

TEST(Simulator, AbsMispredictCost) {
  Module M = parseModule(AbsText);
  SimResult Two = simulate(M, "abs", absInput(-5), MachineModel{});
  EXPECT_EQ(Two.Cycles, 18u);
  EXPECT_EQ(Two.Branches, 1u);
  EXPECT_EQ(Two.Mispredictions, 1u);
  ASSERT_EQ(Two.Sites.size(), 1u);
  EXPECT_EQ(Two.Sites[0].Name, "@abs:entry");
  SimResult Oracle =
      simulate(M, "abs", absInput(-5), withPredictor(PredictorKind::Oracle));
  EXPECT_EQ(Oracle.Cycles, 3u);
  EXPECT_EQ(Oracle.Mispredictions, 0u);
  SimResult Free =
      simulate(M, "abs", absInput(-5), withPredictor(PredictorKind::TwoBit, 0));
  EXPECT_EQ(Free.Cycles, 4u);
  // Not-taken is predicted correctly from the initial counter.
  EXPECT_EQ(simulate(M, "abs", absInput(5), MachineModel{}).Mispredictions, 0u);
}

TEST(Simulator, AlwaysTaken) {
  Module M = parseModule(AbsText);
  MachineModel MM = withPredictor(PredictorKind::AlwaysTaken);
  EXPECT_EQ(simulate(M, "abs", absInput(-5), MM).Mispredictions, 0u);
  EXPECT_EQ(simulate(M, "abs", absInput(5), MM).Mispredictions, 1u);
}

TEST(Simulator, ConvertedAbsHasNoBranch) {
  Module M = parseModule(AbsText);
  Module C = applyBitmask(M, Bitmask::parse("1")).first;
  SimResult R = simulate(C, "abs", absInput(-5), MachineModel{});
  EXPECT_EQ(R.Branches, 0u);
  EXPECT_TRUE(R.Sites.empty());
  // cmp and sub at 0, select at 1, ret at 2.
  EXPECT_EQ(R.Cycles, 3u);
  EXPECT_EQ(speedup(simulate(M, "abs", absInput(-5), MachineModel{}), R),
            Rational(6));
}

TEST(Simulator, AlternatingBranchDefeatsTwoBit) {
  Module M = parseModule(AlternatingText);
  Inputs In;
  In.Params["n"] = 100;
  SimResult R = simulate(M, "main", In, MachineModel{});
  ASSERT_EQ(R.Sites.size(), 2u);
  EXPECT_EQ(R.Sites[0].Name, "@main:latch");
  EXPECT_EQ(R.Sites[1].Name, "@main:loop");
  EXPECT_EQ(R.Sites[1].Executions, 100u);
  // Starts taken from a weakly not-taken counter: every outcome is missed.
  EXPECT_GE(R.Sites[1].Mispredictions, 90u);
  // Loop back-edge: mispredicted on the first iteration and the exit.
  EXPECT_LE(R.Sites[0].Mispredictions, 3u);

  Module C = applyBitmask(M, Bitmask::parse("1")).first;
  SimResult RC = simulate(C, "main", In, MachineModel{});
  EXPECT_EQ(RC.Sites.size(), 1u);
  EXPECT_GT(speedup(R, RC), Rational(2));
}

TEST(Simulator, MonotoneInPenalty) {
  for (const std::string &Name : kernelNames()) {
    Kernel K = loadKernel(Name);
    std::uint64_t Prev = 0;
    for (unsigned Penalty : {0u, 7u, 14u, 28u}) {
      SimResult R = simulate(K.M, K.Entry, K.In,
                             withPredictor(PredictorKind::TwoBit, Penalty));
      EXPECT_GE(R.Cycles, Prev) << Name << " penalty " << Penalty;
      Prev = R.Cycles;
    }
  }
}

TEST(Simulator, OracleNeverSlower) {
  for (const std::string &Name : kernelNames()) {
    Kernel K = loadKernel(Name);
    ExecResult E = interpret(K.M, K.Entry, K.In);
    SimResult Two = simulateTrace(K.M, K.Entry, E, MachineModel{});
    SimResult Or =
        simulateTrace(K.M, K.Entry, E, withPredictor(PredictorKind::Oracle));
    EXPECT_LE(Or.Cycles, Two.Cycles) << Name;
    EXPECT_EQ(Or.Mispredictions, 0u);
    EXPECT_EQ(Or.DynamicInstructions, Two.DynamicInstructions);
    EXPECT_EQ(Or.Branches, Two.Branches);
  }
}

TEST(Simulator, Deterministic) {
  Kernel K = loadKernel("sortcmp");
  SimResult A = simulate(K.M, K.Entry, K.In, MachineModel{});
  SimResult B = simulate(K.M, K.Entry, K.In, MachineModel{});
  EXPECT_EQ(A, B);
  EXPECT_GT(A.Mispredictions, 0u);
}

TEST(Simulator, TrapPropagates) {
  Module M = parseModule("func @f(%a) {\nentry:\n  %x = div 1, %a\n  ret %x\n}\n");
  Inputs In;
  In.Params["a"] = 0;
  EXPECT_THROW(simulate(M, "f", In, MachineModel{}), TrapError);
}

TEST(Simulator, UnknownFunction) {
  Module M = parseModule(AbsText);
  ExecResult E = interpret(M, "abs", absInput(1));
  EXPECT_THROW(simulateTrace(M, "nope", E, MachineModel{}), UserError);
}

TEST(Simulator, CsvSummary) {
  Module M = parseModule(AbsText);
  SimResult R = simulate(M, "abs", absInput(-5), MachineModel{});
  EXPECT_EQ(R.csv(), "cycles,dynamic_instructions,branches,mispredictions\n"
                     "18,6,1,1\n");
  EXPECT_EQ(R.csv('\t'), "cycles\tdynamic_instructions\tbranches\tmispredictions\n"
                         "18\t6\t1\t1\n");
}

TEST(Speedup, Exact) {
  SimResult A, B;
  A.Cycles = 1086;
  B.Cycles = 1000;
  EXPECT_EQ(speedup(A, B), Rational(1086, 1000));
  EXPECT_EQ(speedup(A, B).toFixed(6), "1.086000");
  EXPECT_EQ(speedup(B, B), Rational(1));
  SimResult Zero;
  EXPECT_THROW(speedup(Zero, A), UserError);
  EXPECT_THROW(speedup(A, Zero), UserError);
}

TEST(MachineModelConfig, ParseAndPrint) {
  MachineModel MM = parseMachineModel("issue_width = 2\nmispredict_penalty = 20\n"
                                      "assumed_misrate = 0.125\n"
                                      "predictor = oracle\nlatency.mul = 4\n");
  EXPECT_EQ(MM.IssueWidth, 2u);
  EXPECT_EQ(MM.MispredictPenalty, 20u);
  EXPECT_EQ(MM.AssumedMisrate, Rational(1, 8));
  EXPECT_EQ(MM.Predictor, PredictorKind::Oracle);
  EXPECT_EQ(MM.latency(Opcode::Mul), 4u);
  EXPECT_EQ(MM.latency(Opcode::Add), 1u);
  EXPECT_EQ(parseMachineModel(printMachineModel(MM)), MM);
  EXPECT_EQ(parseMachineModel(readText(kernelDir() + "/default.cfg")),
            MachineModel{});
}

TEST(MachineModelConfig, Rejects) {
  EXPECT_THROW(parseMachineModel("predictor = perceptron\n"), UserError);
  EXPECT_THROW(parseMachineModel("issue_width = 0\n"), UserError);
  EXPECT_THROW(parseMachineModel("bogus = 1\n"), UserError);
  EXPECT_THROW(parseMachineModel("latency.frob = 1\n"), UserError);
  EXPECT_THROW(parseMachineModel("issue_width = -1\n"), UserError);
  EXPECT_THROW(parseDecimal("1.2.3"), UserError);
}
