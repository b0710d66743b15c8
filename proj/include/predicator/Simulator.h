//===-- predicator/Simulator.h - Trace-driven cycle model -------*- C++ -*-===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Replays the interpreter's dynamic trace through an in-order-issue,
// out-of-order-completion machine with a fixed issue width. Mispredicted
// branches stall all later fetch until the branch resolves plus the
// misprediction penalty.
//
//===----------------------------------------------------------------------===//

#ifndef PREDICATOR_SIMULATOR_H
#define PREDICATOR_SIMULATOR_H

#include "predicator/Interpreter.h"
#include "predicator/MachineModel.h"
#include "predicator/Rational.h"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace predicator {

/// Per-site 2-bit saturating counters, initially 1 (weakly not-taken).
class PredictorState {
public:
  explicit PredictorState(std::size_t NumSites = 0) : Counters(NumSites, 1) {}

  /// Returns the prediction made before updating the counter.
  bool predictAndUpdate(std::size_t Site, bool Taken);
  std::uint8_t counter(std::size_t Site) const { return Counters.at(Site); }
  void setCounter(std::size_t Site, std::uint8_t V);

private:
  std::vector<std::uint8_t> Counters;
};

struct SiteStats {
  std::string Name; ///< "@fn:head".
  std::uint64_t Executions = 0;
  std::uint64_t Mispredictions = 0;

  friend bool operator==(const SiteStats &, const SiteStats &) = default;
};

struct SimResult {
  std::uint64_t Cycles = 0;
  std::uint64_t DynamicInstructions = 0;
  std::uint64_t Branches = 0;
  std::uint64_t Mispredictions = 0;
  /// Indexed by branch site id of the simulated module.
  std::vector<SiteStats> Sites;

  /// Header plus one summary row.
  std::string csv(char Sep = ',') const;

  friend bool operator==(const SimResult &, const SimResult &) = default;
};

/// Costs an already computed execution of function `Fn` of M.
SimResult simulateTrace(const Module &M, std::string_view Fn,
                        const ExecResult &Exec, const MachineModel &MM);

/// Interprets then costs. Traps propagate as TrapError.
SimResult simulate(const Module &M, std::string_view Fn, const Inputs &In,
                   const MachineModel &MM);

/// base.Cycles / cand.Cycles, exactly. Throws UserError on zero cycles.
Rational speedup(const SimResult &Base, const SimResult &Cand);

} // namespace predicator

#endif // PREDICATOR_SIMULATOR_H
