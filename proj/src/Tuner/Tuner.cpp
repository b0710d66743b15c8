//===-- Tuner.cpp - Evolutionary if-conversion search ---------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "predicator/Tuner.h"
#include "predicator/CFG.h"
#include "predicator/Error.h"
#include "predicator/IfConversion.h"
#include "predicator/Validator.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <thread>

using namespace predicator;

std::string predicator::formatFixed(double V, int Digits) {
  char Buf[64];
  auto [End, Ec] = std::to_chars(Buf, Buf + sizeof(Buf), V,
                                 std::chars_format::fixed, Digits);
  if (Ec != std::errc())
    throw InternalError("cannot format value");
  return std::string(Buf, End);
}

Program Program::build(Module M, std::string Entry, const MachineModel &MM) {
  requireValid(M);
  if (Entry.empty()) {
    if (M.function("main"))
      Entry = "main";
    else if (M.Functions.size() == 1)
      Entry = M.Functions.front().Name;
    else
      throw UserError("module has several functions and none is '@main'; "
                      "name the entry function explicitly");
  }
  if (!M.function(Entry))
    throw UserError("unknown entry function '@" + Entry + "'");
  Program P;
  P.Candidates = findModuleCandidates(M);
  std::map<std::string, CfgInfo> Cfgs;
  for (const Candidate &C : P.Candidates) {
    const Function &F = *M.function(C.Function);
    auto [It, New] = Cfgs.try_emplace(C.Function);
    if (New)
      It->second = analyzeCFG(F);
    P.Features.push_back(extractFeatures(M, F, C, MM, It->second));
  }
  if (!P.Features.empty())
    P.Normalized = normalizeFeatures(P.Features);
  P.M = std::move(M);
  P.Entry = std::move(Entry);
  return P;
}

Bitmask predicator::baselineBitmask(const Program &P, const MachineModel &MM) {
  Bitmask B;
  for (const FeatureVector &FV : P.Features)
    B.Bits.push_back(baselineDecide(FV, MM));
  return B;
}

Bitmask predicator::genomeBitmask(const neat::Genome &G,
                                  const std::vector<NormalizedVector> &NV,
                                  double Threshold, double Slope) {
  Bitmask B;
  for (const NormalizedVector &X : NV)
    B.Bits.push_back(neat::activate(G, X, Slope) >= Threshold);
  return B;
}

double predicator::geometricMeanSpeedup(const std::vector<SimResult> &Base,
                                        const std::vector<SimResult> &Cand) {
  if (Base.size() != Cand.size() || Base.empty())
    throw InternalError("speedup over mismatched workload sets");
  if (Base.size() == 1)
    return speedup(Base[0], Cand[0]).toDouble();
  double LogSum = 0.0;
  for (std::size_t I = 0; I < Base.size(); ++I)
    LogSum += std::log(speedup(Base[I], Cand[I]).toDouble());
  return std::exp(LogSum / static_cast<double>(Base.size()));
}

namespace {

unsigned threadCount(unsigned Requested) {
  if (Requested)
    return Requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs Fn(I) for I in [0, N) on up to Threads workers. The first exception
/// is rethrown on the calling thread.
template <typename FnT>
void parallelFor(std::size_t N, unsigned Threads, FnT Fn) {
  Threads = static_cast<unsigned>(std::min<std::size_t>(Threads, N));
  if (Threads <= 1) {
    for (std::size_t I = 0; I < N; ++I)
      Fn(I);
    return;
  }
  std::atomic<std::size_t> Next{0};
  std::exception_ptr Failure;
  std::mutex FailureLock;
  std::vector<std::thread> Pool;
  for (unsigned T = 0; T < Threads; ++T)
    Pool.emplace_back([&] {
      for (std::size_t I; (I = Next.fetch_add(1)) < N;) {
        try {
          Fn(I);
        } catch (...) {
          std::lock_guard<std::mutex> G(FailureLock);
          if (!Failure)
            Failure = std::current_exception();
          Next = N;
        }
      }
    });
  for (std::thread &T : Pool)
    T.join();
  if (Failure)
    std::rethrow_exception(Failure);
}

} // namespace

Evaluator::Evaluator(const Program &P, std::vector<Workload> Workloads,
                     const MachineModel &MM)
    : P(P), Ws(std::move(Workloads)), MM(MM) {
  if (Ws.empty())
    throw UserError("at least one workload is required");
  for (const Workload &W : Ws) {
    try {
      interpret(P.M, P.Entry, W.In);
    } catch (const TrapError &E) {
      throw UserError("workload '" + W.Name +
                      "' traps on the original module: " + E.what());
    }
  }
  BaselineBits = baselineBitmask(P, MM);
  BaselineSims = simulateBitmask(BaselineBits);
}

std::vector<SimResult> Evaluator::simulateBitmask(const Bitmask &B) const {
  Module Converted = applyBitmask(P.M, B).first;
  std::vector<SimResult> Out;
  for (const Workload &W : Ws)
    Out.push_back(simulate(Converted, P.Entry, W.In, MM));
  return Out;
}

double Evaluator::compute(const Bitmask &B, std::string &Diag) const {
  try {
    return geometricMeanSpeedup(BaselineSims, simulateBitmask(B));
  } catch (const TrapError &E) {
    Diag = "bitmask " + B.str() + " trapped: " + E.what();
    return 0.0;
  }
}

double Evaluator::fitness(const Bitmask &B) {
  {
    std::lock_guard<std::mutex> G(Lock);
    auto It = Cache.find(B);
    if (It != Cache.end())
      return It->second;
  }
  std::string Diag;
  double F = compute(B, Diag);
  std::lock_guard<std::mutex> G(Lock);
  auto [It, Inserted] = Cache.emplace(B, F);
  if (Inserted && !Diag.empty())
    Diags.push_back(std::move(Diag));
  return It->second;
}

std::size_t Evaluator::cacheSize() const {
  std::lock_guard<std::mutex> G(Lock);
  return Cache.size();
}

std::vector<std::string> Evaluator::diagnostics() const {
  std::lock_guard<std::mutex> G(Lock);
  std::vector<std::string> Out = Diags;
  std::sort(Out.begin(), Out.end());
  return Out;
}

std::string TuneResult::historyCsv(char Sep) const {
  std::ostringstream OS;
  OS << "generation" << Sep << "best_fitness" << Sep << "mean_fitness" << Sep
     << "species_count" << Sep << "best_bitmask\n";
  for (const HistoryRow &R : History)
    OS << R.Generation << Sep << formatFixed(R.BestFitness) << Sep
       << formatFixed(R.MeanFitness) << Sep << R.SpeciesCount << Sep
       << R.BestBitmask.str() << '\n';
  return OS.str();
}

TuneResult predicator::tune(const Program &P, const std::vector<Workload> &Ws,
                            const neat::NeatConfig &Cfg, const MachineModel &MM,
                            std::uint64_t Seed, const TuneOptions &Opts) {
  if (P.Candidates.empty())
    throw UserError("nothing to tune: the module has no if-conversion "
                    "candidates");
  Cfg.validate();
  Evaluator Eval(P, Ws, MM);
  unsigned Threads = threadCount(Opts.Threads);

  TuneResult R;
  R.Candidates = P.Candidates.size();
  R.BaselineBitmask = Eval.baseline();
  for (std::size_t I = 0; I < Ws.size(); ++I)
    R.BaselineCycles.push_back({Ws[I].Name, Eval.baselineResults()[I].Cycles});

  neat::Rng Rng(Seed);
  neat::Population Pop =
      neat::initPopulation(Cfg, NumFeatures, /*Outputs=*/1, Rng);
  neat::SpeciesSet Species;
  bool HaveBest = false;
  for (std::size_t Gen = 0; Gen < Cfg.Generations; ++Gen) {
    if (Pop.Restarted)
      R.Notes.push_back("generation " + std::to_string(Gen) +
                        ": every species stagnated; restarted from the two "
                        "best genomes");
    std::vector<Bitmask> Masks(Pop.Genomes.size());
    for (std::size_t I = 0; I < Pop.Genomes.size(); ++I)
      Masks[I] = genomeBitmask(Pop.Genomes[I], P.Normalized,
                               Cfg.OutputThreshold, Cfg.SigmoidSlope);
    // Each distinct bitmask is simulated once; results are merged by genome
    // index so the outcome does not depend on scheduling.
    std::vector<Bitmask> Unique(Masks);
    std::sort(Unique.begin(), Unique.end());
    Unique.erase(std::unique(Unique.begin(), Unique.end()), Unique.end());
    parallelFor(Unique.size(), Threads,
                [&](std::size_t I) { Eval.fitness(Unique[I]); });
    std::vector<double> Fitness(Pop.Genomes.size());
    double Sum = 0.0;
    for (std::size_t I = 0; I < Pop.Genomes.size(); ++I) {
      Fitness[I] = Eval.fitness(Masks[I]);
      Pop.Genomes[I].Fitness = Fitness[I];
      Sum += Fitness[I];
      if (!HaveBest || Fitness[I] > R.BestFitness) {
        HaveBest = true;
        R.BestFitness = Fitness[I];
        R.BestGenome = Pop.Genomes[I];
        R.BestBitmask = Masks[I];
      }
    }
    Species = neat::speciate(Pop, Cfg, Species);
    if (Opts.OnGeneration)
      Opts.OnGeneration(Pop, Species, Fitness);

    HistoryRow Row;
    Row.Generation = Gen;
    Row.BestFitness = R.BestFitness;
    Row.MeanFitness = Sum / static_cast<double>(Fitness.size());
    Row.SpeciesCount = Species.Species.size();
    Row.BestBitmask = R.BestBitmask;
    R.History.push_back(std::move(Row));

    if (Gen + 1 < Cfg.Generations)
      Pop = neat::nextGeneration(Pop, Species, Fitness, Cfg, Rng);
  }
  for (std::string &D : Eval.diagnostics())
    R.Notes.push_back(std::move(D));
  R.ConvertedModule = printModule(applyBitmask(P.M, R.BestBitmask).first);
  return R;
}

std::string OracleResult::csv(char Sep) const {
  std::ostringstream OS;
  OS << "bitmask" << Sep << "speedup\n";
  for (const OracleRow &Row : Table)
    OS << Row.Bits.str() << Sep << formatFixed(Row.Speedup) << '\n';
  return OS.str();
}

OracleResult predicator::exhaustiveSearch(const Program &P,
                                          const std::vector<Workload> &Ws,
                                          const MachineModel &MM,
                                          std::size_t Limit,
                                          std::size_t TableCutoff,
                                          unsigned Threads) {
  const std::size_t N = P.Candidates.size();
  if (N > Limit || N >= 63)
    throw UserError("exhaustive search refused: " + std::to_string(N) +
                    " candidates exceed the limit of " + std::to_string(Limit));
  Evaluator Eval(P, Ws, MM);
  const std::uint64_t Count = std::uint64_t{1} << N;
  std::vector<double> Speedups(Count);
  parallelFor(Count, threadCount(Threads), [&](std::size_t K) {
    Speedups[K] = Eval.fitness(Bitmask::fromInteger(K, N));
  });

  OracleResult R;
  R.Candidates = N;
  R.BaselineBitmask = Eval.baseline();
  std::uint64_t Best = 0;
  for (std::uint64_t K = 1; K < Count; ++K) {
    if (Speedups[K] > Speedups[Best] ||
        (Speedups[K] == Speedups[Best] &&
         std::popcount(K) < std::popcount(Best)))
      Best = K;
  }
  R.Optimal = Bitmask::fromInteger(Best, N);
  R.OptimalSpeedup = Speedups[Best];
  if (N <= TableCutoff)
    for (std::uint64_t K = 0; K < Count; ++K)
      R.Table.push_back({Bitmask::fromInteger(K, N), Speedups[K]});
  return R;
}
