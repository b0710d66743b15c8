//===-- TunerTest.cpp - Fitness, evolution loop and exhaustive oracle -----===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "TestUtil.h"

#include "predicator/Tuner.h"

#include <gtest/gtest.h>

using namespace predicator;
using namespace predicator::test;

namespace {

/// N back-to-back abs triangles; each join heads the next.
std::string chainText(std::size_t N) {
  std::string S = "func @main(%v0) {\nb0:\n";
  for (std::size_t K = 0; K < N; ++K) {
    std::string I = std::to_string(K), J = std::to_string(K + 1);
    S += "  %c" + I + " = icmp.slt %v" + I + ", " + I + "\n";
    S += "  br %c" + I + ", t" + I + ", b" + J + "\n";
    S += "t" + I + ":\n  %s" + I + " = sub " + I + ", %v" + I + "\n  jmp b" + J + "\n";
    S += "b" + J + ":\n  %v" + J + " = phi [t" + I + ": %s" + I + "], [b" + I +
         ": %v" + I + "]\n";
  }
  S += "  ret %v" + std::to_string(N) + "\n}\n";
  return S;
}

std::vector<Workload> kernelWorkloads(const Kernel &K) {
  return {{K.Name, K.In}};
}

Workload absWorkload(std::int64_t X) {
  Workload W;
  W.Name = "x" + std::to_string(X);
  W.In.Params["x"] = X;
  return W;
}

neat::Genome constantGenome(double Bias) {
  neat::Rng R(1);
  neat::Genome G = neat::initPopulation({}, NumFeatures, 1, R).Genomes[0];
  for (neat::ConnectionGene &C : G.Connections)
    C.Weight = C.From == NumFeatures ? Bias : 0.0;
  return G;
}

neat::NeatConfig smallConfig(std::size_t Gens = 12) {
  neat::NeatConfig Cfg;
  Cfg.Generations = Gens;
  Cfg.PopulationSize = 16;
  return Cfg;
}

} // namespace

TEST(Program, BuildPicksEntry) {
  Program P = Program::build(parseModule(AbsText), "", MachineModel{});
  EXPECT_EQ(P.Entry, "abs");
  EXPECT_EQ(P.Candidates.size(), 1u);
  EXPECT_EQ(P.Features.size(), 1u);
  EXPECT_EQ(P.Normalized.size(), 1u);
  Kernel K = loadKernel("statemach");
  Program Q = Program::build(K.M, "", MachineModel{});
  EXPECT_EQ(Q.Entry, "main");
  EXPECT_THROW(Program::build(K.M, "nope", MachineModel{}), UserError);
}

TEST(Bitmasks, GenomeDecisions) {
  Kernel K = loadKernel("statemach");
  Program P = Program::build(K.M, K.Entry, MachineModel{});
  ASSERT_EQ(P.Candidates.size(), 3u);
  // Zero weights give 0.5 everywhere, which reaches the threshold.
  EXPECT_EQ(genomeBitmask(constantGenome(0.0), P.Normalized).str(), "111");
  EXPECT_EQ(genomeBitmask(constantGenome(-5.0), P.Normalized).str(), "000");
  EXPECT_EQ(genomeBitmask(constantGenome(0.0), {}).size(), 0u);
}

TEST(Fitness, GeometricMean) {
  std::vector<SimResult> Base(2), Cand(2);
  Base[0].Cycles = 200;
  Cand[0].Cycles = 100;
  Base[1].Cycles = 100;
  Cand[1].Cycles = 200;
  EXPECT_NEAR(geometricMeanSpeedup(Base, Cand), 1.0, 1e-12);
  Base[1].Cycles = 400;
  EXPECT_NEAR(geometricMeanSpeedup(Base, Cand), 2.0, 1e-12);
  std::vector<SimResult> B1(1), C1(1);
  B1[0].Cycles = 1086;
  C1[0].Cycles = 1000;
  EXPECT_EQ(geometricMeanSpeedup(B1, C1), 1.086);
  EXPECT_THROW(geometricMeanSpeedup(B1, Cand), std::exception);
}

TEST(Fitness, BaselineIsExactlyOne) {
  for (const std::string &Name : kernelNames()) {
    Kernel K = loadKernel(Name);
    Program P = Program::build(K.M, K.Entry, MachineModel{});
    Evaluator E(P, kernelWorkloads(K), MachineModel{});
    EXPECT_EQ(E.fitness(E.baseline()), 1.0) << Name;
    EXPECT_EQ(E.baseline(), baselineBitmask(P, MachineModel{}));
  }
}

TEST(Fitness, SortcmpRewardsConversion) {
  Kernel K = loadKernel("sortcmp");
  Program P = Program::build(K.M, K.Entry, MachineModel{});
  Evaluator E(P, kernelWorkloads(K), MachineModel{});
  EXPECT_EQ(E.baseline().str(), "0");
  EXPECT_GT(E.fitness(Bitmask::parse("1")), 1.0);
}

TEST(Fitness, CacheIsSound) {
  Kernel K = loadKernel("statemach");
  Program P = Program::build(K.M, K.Entry, MachineModel{});
  Evaluator E(P, kernelWorkloads(K), MachineModel{});
  Bitmask B = Bitmask::parse("101");
  double First = E.fitness(B);
  std::size_t Size = E.cacheSize();
  EXPECT_EQ(E.fitness(B), First);
  EXPECT_EQ(E.cacheSize(), Size);
  // A fresh evaluator recomputes the same value.
  Evaluator Fresh(P, kernelWorkloads(K), MachineModel{});
  EXPECT_EQ(Fresh.fitness(B), First);
  EXPECT_THROW(E.fitness(Bitmask::parse("1")), UserError);
}

TEST(Fitness, TrappingWorkloadRejected) {
  Kernel K = loadKernel("maxreduce");
  Program P = Program::build(K.M, K.Entry, MachineModel{});
  Workload W{"oob", K.In};
  W.In.Params["n"] = 1000;
  EXPECT_THROW(Evaluator(P, {W}, MachineModel{}), UserError);
}

TEST(Tune, AbsDefaultBudget) {
  Program P = Program::build(parseModule(AbsText), "", MachineModel{});
  TuneOptions Opts;
  std::size_t Calls = 0;
  Opts.OnGeneration = [&](const neat::Population &Pop, const neat::SpeciesSet &,
                          const std::vector<double> &Fit) {
    EXPECT_EQ(Pop.Genomes.size(), 30u);
    EXPECT_EQ(Fit.size(), 30u);
    ++Calls;
  };
  TuneResult R = tune(P, {absWorkload(-5), absWorkload(9)}, neat::NeatConfig{},
                      MachineModel{}, 1, Opts);
  EXPECT_EQ(Calls, 50u);
  ASSERT_EQ(R.History.size(), 50u);
  EXPECT_EQ(R.History.front().Generation, 0u);
  EXPECT_EQ(R.History.back().Generation, 49u);
  EXPECT_EQ(R.Candidates, 1u);
  OracleResult O =
      exhaustiveSearch(P, {absWorkload(-5), absWorkload(9)}, MachineModel{});
  EXPECT_EQ(R.BestFitness, O.OptimalSpeedup);
  EXPECT_EQ(R.BestBitmask, O.Optimal);
  EXPECT_EQ(R.BaselineBitmask.str(), "1");
  EXPECT_EQ(R.BaselineCycles.size(), 2u);
  EXPECT_FALSE(R.ConvertedModule.empty());
}

TEST(Tune, SameSeedSameResult) {
  Kernel K = loadKernel("statemach");
  Program P = Program::build(K.M, K.Entry, MachineModel{});
  TuneOptions One, Many;
  One.Threads = 1;
  Many.Threads = 4;
  TuneResult A = tune(P, kernelWorkloads(K), smallConfig(), MachineModel{}, 5, One);
  TuneResult B = tune(P, kernelWorkloads(K), smallConfig(), MachineModel{}, 5, Many);
  EXPECT_EQ(A.historyCsv(), B.historyCsv());
  EXPECT_EQ(A.BestGenome.serialize(), B.BestGenome.serialize());
  EXPECT_EQ(A.BestBitmask, B.BestBitmask);
  EXPECT_EQ(A.ConvertedModule, B.ConvertedModule);
  EXPECT_EQ(A.Notes, B.Notes);
}

TEST(Tune, HistoryIsMonotoneAndBoundedByOracle) {
  for (const std::string &Name : {"clampsum", "nested", "statemach"}) {
    Kernel K = loadKernel(Name);
    Program P = Program::build(K.M, K.Entry, MachineModel{});
    OracleResult O = exhaustiveSearch(P, kernelWorkloads(K), MachineModel{});
    TuneResult R = tune(P, kernelWorkloads(K), smallConfig(), MachineModel{}, 3);
    double Prev = 0.0;
    for (const HistoryRow &H : R.History) {
      EXPECT_GE(H.BestFitness, Prev) << Name;
      EXPECT_LE(H.MeanFitness, H.BestFitness) << Name;
      EXPECT_GE(H.SpeciesCount, 1u);
      Prev = H.BestFitness;
    }
    EXPECT_EQ(R.BestFitness, R.History.back().BestFitness);
    EXPECT_LE(R.BestFitness, O.OptimalSpeedup) << Name;
    // The baseline genome's decision is in the search space, so the oracle
    // is never below it.
    EXPECT_GE(O.OptimalSpeedup, 1.0);
    Evaluator E(P, kernelWorkloads(K), MachineModel{});
    EXPECT_EQ(E.fitness(R.BestBitmask), R.BestFitness);
  }
}

TEST(Tune, NothingToTune) {
  Module M = parseModule("func @f(%a) {\nentry:\n  ret %a\n}\n");
  Program P = Program::build(M, "", MachineModel{});
  Workload W;
  W.In.Params["a"] = 1;
  try {
    tune(P, {W}, smallConfig(), MachineModel{}, 1);
    FAIL();
  } catch (const UserError &E) {
    EXPECT_NE(std::string(E.what()).find("nothing to tune"), std::string::npos);
  }
}

TEST(Exhaustive, AbsTable) {
  Program P = Program::build(parseModule(AbsText), "", MachineModel{});
  OracleResult O = exhaustiveSearch(P, {absWorkload(-5)}, MachineModel{});
  ASSERT_EQ(O.Table.size(), 2u);
  EXPECT_EQ(O.Table[0].Bits.str(), "0");
  EXPECT_EQ(O.Table[1].Bits.str(), "1");
  // Baseline converts: branchy 18 cycles vs 3.
  EXPECT_DOUBLE_EQ(O.Table[0].Speedup, 3.0 / 18.0);
  EXPECT_EQ(O.Table[1].Speedup, 1.0);
  EXPECT_EQ(O.Optimal.str(), "1");
  EXPECT_EQ(O.csv(), "bitmask,speedup\n0,0.166667\n1,1.000000\n");
}

TEST(Exhaustive, TieBreaksTowardFewerConversions) {
  // Positive x never takes the branch, so conversion only adds the select.
  Program P = Program::build(parseModule(AbsText), "", MachineModel{});
  MachineModel MM;
  MM.Predictor = PredictorKind::Oracle;
  OracleResult O = exhaustiveSearch(P, {absWorkload(5)}, MM);
  if (O.Table[0].Speedup == O.Table[1].Speedup)
    EXPECT_EQ(O.Optimal.str(), "0");
  else
    EXPECT_EQ(O.Optimal, O.Table[0].Speedup > O.Table[1].Speedup
                             ? O.Table[0].Bits
                             : O.Table[1].Bits);
}

TEST(Exhaustive, LimitRefusal) {
  Module M = parseModule(chainText(21));
  Program P = Program::build(M, "", MachineModel{});
  ASSERT_EQ(P.Candidates.size(), 21u);
  Workload W;
  W.In.Params["v0"] = -3;
  try {
    exhaustiveSearch(P, {W}, MachineModel{});
    FAIL();
  } catch (const UserError &E) {
    std::string Msg = E.what();
    EXPECT_NE(Msg.find("21"), std::string::npos);
    EXPECT_NE(Msg.find("20"), std::string::npos);
  }
  Program Small = Program::build(parseModule(chainText(4)), "", MachineModel{});
  OracleResult O = exhaustiveSearch(Small, {W}, MachineModel{});
  EXPECT_EQ(O.Table.size(), 16u);
  OracleResult NoTable = exhaustiveSearch(Small, {W}, MachineModel{}, 20, 3);
  EXPECT_TRUE(NoTable.Table.empty());
  EXPECT_EQ(NoTable.Optimal, O.Optimal);
}

TEST(Exhaustive, NoCandidates) {
  Module M = parseModule("func @f(%a) {\nentry:\n  ret %a\n}\n");
  Program P = Program::build(M, "", MachineModel{});
  Workload W;
  W.In.Params["a"] = 1;
  OracleResult O = exhaustiveSearch(P, {W}, MachineModel{});
  ASSERT_EQ(O.Table.size(), 1u);
  EXPECT_EQ(O.Optimal.size(), 0u);
  EXPECT_EQ(O.OptimalSpeedup, 1.0);
}

TEST(Exhaustive, ParallelMatchesSerial) {
  Kernel K = loadKernel("statemach");
  Program P = Program::build(K.M, K.Entry, MachineModel{});
  OracleResult A = exhaustiveSearch(P, kernelWorkloads(K), MachineModel{}, 20, 16, 1);
  OracleResult B = exhaustiveSearch(P, kernelWorkloads(K), MachineModel{}, 20, 16, 8);
  EXPECT_EQ(A.csv(), B.csv());
  EXPECT_EQ(A.Optimal, B.Optimal);
}

TEST(Format, Fixed) {
  EXPECT_EQ(formatFixed(1.05), "1.050000");
  EXPECT_EQ(formatFixed(1.0 / 3.0), "0.333333");
  EXPECT_EQ(formatFixed(2.5, 2), "2.50");
}
