//===-- MachineModel.cpp - Target cost parameters -------------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "predicator/MachineModel.h"
#include "predicator/Config.h"
#include "predicator/Error.h"

#include <sstream>

using namespace predicator;

std::string_view predicator::predictorName(PredictorKind K) {
  switch (K) {
  case PredictorKind::TwoBit:
    return "twobit";
  case PredictorKind::AlwaysTaken:
    return "always_taken";
  case PredictorKind::Oracle:
    return "oracle";
  }
  return "unknown";
}

LatencyTable predicator::defaultLatencies() {
  LatencyTable T;
  T.fill(1);
  T[static_cast<std::size_t>(Opcode::Mul)] = 3;
  T[static_cast<std::size_t>(Opcode::Load)] = 3;
  T[static_cast<std::size_t>(Opcode::Div)] = 12;
  T[static_cast<std::size_t>(Opcode::Rem)] = 12;
  T[static_cast<std::size_t>(Opcode::Jmp)] = 0;
  T[static_cast<std::size_t>(Opcode::Phi)] = 0;
  return T;
}

Rational predicator::parseDecimal(std::string_view Text) {
  std::int64_t Num = 0, Den = 1;
  bool SeenDot = false, SeenDigit = false;
  for (char C : Text) {
    if (C == '.' && !SeenDot) {
      SeenDot = true;
      continue;
    }
    if (C < '0' || C > '9' || Num > INT64_MAX / 100 || Den > INT64_MAX / 100)
      throw UserError("invalid decimal '" + std::string(Text) + "'");
    SeenDigit = true;
    Num = Num * 10 + (C - '0');
    if (SeenDot)
      Den *= 10;
  }
  if (!SeenDigit)
    throw UserError("invalid decimal '" + std::string(Text) + "'");
  return Rational(Num, Den);
}

MachineModel predicator::parseMachineModel(std::string_view Text) {
  MachineModel MM;
  for (const ConfigEntry &E : parseConfig(Text)) {
    auto fail = [&](const std::string &Why) {
      return UserError("machine model line " + std::to_string(E.Line) + ": " +
                       Why);
    };
    if (E.Key == "issue_width") {
      MM.IssueWidth = configUnsigned(E);
      if (MM.IssueWidth == 0)
        throw fail("issue_width must be at least 1");
    } else if (E.Key == "mispredict_penalty") {
      MM.MispredictPenalty = configUnsigned(E);
    } else if (E.Key == "assumed_misrate") {
      MM.AssumedMisrate = parseDecimal(E.Value);
      if (MM.AssumedMisrate > Rational(1))
        throw fail("assumed_misrate must lie in [0,1]");
    } else if (E.Key == "predictor") {
      if (E.Value == "twobit")
        MM.Predictor = PredictorKind::TwoBit;
      else if (E.Value == "always_taken")
        MM.Predictor = PredictorKind::AlwaysTaken;
      else if (E.Value == "oracle")
        MM.Predictor = PredictorKind::Oracle;
      else
        throw fail("unknown predictor '" + E.Value +
                   "' (expected twobit, always_taken or oracle)");
    } else if (E.Key.rfind("latency.", 0) == 0) {
      auto Op = parseAnyOpcode(std::string_view(E.Key).substr(8));
      if (!Op)
        throw fail("unknown opcode in '" + E.Key + "'");
      MM.Latency[static_cast<std::size_t>(*Op)] = configUnsigned(E);
    } else {
      throw fail("unknown key '" + E.Key + "'");
    }
  }
  return MM;
}

std::string predicator::printMachineModel(const MachineModel &MM) {
  std::ostringstream OS;
  OS << "issue_width = " << MM.IssueWidth << '\n'
     << "mispredict_penalty = " << MM.MispredictPenalty << '\n'
     << "assumed_misrate = " << MM.AssumedMisrate.toFixed(6) << '\n'
     << "predictor = " << predictorName(MM.Predictor) << '\n';
  for (std::size_t I = 0; I < NumOpcodes; ++I)
    OS << "latency." << opcodeName(static_cast<Opcode>(I)) << " = "
       << MM.Latency[I] << '\n';
  return OS.str();
}
