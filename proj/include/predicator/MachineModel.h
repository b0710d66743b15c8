//===-- predicator/MachineModel.h - Target cost parameters ------*- C++ -*-===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef PREDICATOR_MACHINEMODEL_H
#define PREDICATOR_MACHINEMODEL_H

#include "predicator/IR.h"
#include "predicator/Rational.h"

#include <array>
#include <string>
#include <string_view>

namespace predicator {

enum class PredictorKind { TwoBit, AlwaysTaken, Oracle };

std::string_view predictorName(PredictorKind K);

using LatencyTable = std::array<unsigned, NumOpcodes>;

/// add/sub/logic/shift/icmp/select/store/br/ret 1, mul 3, load 3,
/// div/rem 12, jmp 0, phi 0.
LatencyTable defaultLatencies();

struct MachineModel {
  unsigned IssueWidth = 4;
  unsigned MispredictPenalty = 14;
  /// Misprediction rate assumed by the static baseline heuristic only.
  Rational AssumedMisrate{1, 4};
  PredictorKind Predictor = PredictorKind::TwoBit;
  LatencyTable Latency = defaultLatencies();

  unsigned latency(Opcode Op) const {
    return Latency[static_cast<std::size_t>(Op)];
  }

  friend bool operator==(const MachineModel &, const MachineModel &) = default;
};

/// Key-value text: `issue_width = 4`, `mispredict_penalty = 14`,
/// `assumed_misrate = 0.25`, `predictor = twobit`, `latency.mul = 3`.
/// Unlisted keys keep their defaults.
MachineModel parseMachineModel(std::string_view Text);
std::string printMachineModel(const MachineModel &MM);

/// Parses a non-negative decimal such as "0.25" exactly.
Rational parseDecimal(std::string_view Text);

} // namespace predicator

#endif // PREDICATOR_MACHINEMODEL_H
