//===-- predicator/Tuner.h - Evolutionary if-conversion search -*- C++ -*-===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef PREDICATOR_TUNER_H
#define PREDICATOR_TUNER_H

#include "predicator/Candidate.h"
#include "predicator/Features.h"
#include "predicator/IR.h"
#include "predicator/Interpreter.h"
#include "predicator/MachineModel.h"
#include "predicator/NEAT.h"
#include "predicator/Simulator.h"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace predicator {

struct Program {
  Module M;
  std::string Entry;
  std::vector<Candidate> Candidates;
  std::vector<FeatureVector> Features;
  std::vector<NormalizedVector> Normalized;

  /// Validates M and extracts the frozen candidate list and its features.
  /// An empty Entry picks `main`, or the only function.
  static Program build(Module M, std::string Entry, const MachineModel &MM);
};

struct Workload {
  std::string Name;
  Inputs In;
};

/// The baseline heuristic's decision per candidate.
Bitmask baselineBitmask(const Program &P, const MachineModel &MM);

/// Bit I is set iff the shared network's output on candidate I reaches the
/// threshold.
Bitmask genomeBitmask(const neat::Genome &G,
                      const std::vector<NormalizedVector> &NV,
                      double Threshold = 0.5, double Slope = 4.9);

/// Geometric mean of per-workload speedups; exact ratio for one workload.
double geometricMeanSpeedup(const std::vector<SimResult> &Base,
                            const std::vector<SimResult> &Cand);

/// Fitness oracle with a bitmask-keyed cache. fitness() may be called
/// concurrently.
class Evaluator {
public:
  /// Simulates the baseline module on every workload. Throws UserError if a
  /// workload traps on the original module.
  Evaluator(const Program &P, std::vector<Workload> Ws, const MachineModel &MM);

  double fitness(const Bitmask &B);
  std::vector<SimResult> simulateBitmask(const Bitmask &B) const;

  const Bitmask &baseline() const { return BaselineBits; }
  const std::vector<SimResult> &baselineResults() const { return BaselineSims; }
  const std::vector<Workload> &workloads() const { return Ws; }
  std::size_t cacheSize() const;
  /// Traps seen while evaluating converted modules, in first-seen order.
  std::vector<std::string> diagnostics() const;

private:
  double compute(const Bitmask &B, std::string &Diag) const;

  const Program &P;
  std::vector<Workload> Ws;
  MachineModel MM;
  Bitmask BaselineBits;
  std::vector<SimResult> BaselineSims;
  mutable std::mutex Lock;
  std::map<Bitmask, double> Cache;
  std::vector<std::string> Diags;
};

struct HistoryRow {
  std::size_t Generation = 0;
  double BestFitness = 0.0; ///< Best so far.
  double MeanFitness = 0.0; ///< Over this generation.
  std::size_t SpeciesCount = 0;
  Bitmask BestBitmask;      ///< Bitmask of the best so far.
};

struct TuneResult {
  neat::Genome BestGenome;
  Bitmask BestBitmask;
  double BestFitness = 0.0;
  std::vector<HistoryRow> History;
  Bitmask BaselineBitmask;
  std::vector<std::pair<std::string, std::uint64_t>> BaselineCycles;
  std::string ConvertedModule;
  /// Restarts and evaluation traps.
  std::vector<std::string> Notes;
  std::size_t Candidates = 0;

  /// `generation,best_fitness,mean_fitness,species_count,best_bitmask`.
  std::string historyCsv(char Sep = ',') const;
};

/// Observer for per-generation checks; called after speciation.
using GenerationHook = std::function<void(const neat::Population &,
                                          const neat::SpeciesSet &,
                                          const std::vector<double> &)>;

struct TuneOptions {
  unsigned Threads = 0; ///< 0 picks the hardware concurrency.
  GenerationHook OnGeneration;
};

TuneResult tune(const Program &P, const std::vector<Workload> &Ws,
                const neat::NeatConfig &Cfg, const MachineModel &MM,
                std::uint64_t Seed, const TuneOptions &Opts = {});

struct OracleRow {
  Bitmask Bits;
  double Speedup = 0.0;
};

struct OracleResult {
  Bitmask Optimal;
  double OptimalSpeedup = 1.0;
  Bitmask BaselineBitmask;
  std::size_t Candidates = 0;
  /// Every enumerated bitmask, ascending; empty above the table cutoff.
  std::vector<OracleRow> Table;

  /// `bitmask,speedup` rows.
  std::string csv(char Sep = ',') const;
};

/// Enumerates all 2^n bitmasks. Throws UserError when n exceeds Limit.
OracleResult exhaustiveSearch(const Program &P, const std::vector<Workload> &Ws,
                              const MachineModel &MM, std::size_t Limit = 20,
                              std::size_t TableCutoff = 16,
                              unsigned Threads = 0);

/// Fixed-point text with six decimals, independent of the C locale.
std::string formatFixed(double V, int Digits = 6);

} // namespace predicator

#endif // PREDICATOR_TUNER_H
