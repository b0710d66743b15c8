//===-- predicator/Validator.h - IR well-formedness -------------*- C++ -*-===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef PREDICATOR_VALIDATOR_H
#define PREDICATOR_VALIDATOR_H

#include "predicator/IR.h"

#include <optional>
#include <string>
#include <vector>

namespace predicator {

/// One broken rule. Rule ids are stable strings such as "def-before-use",
/// "phi-pred-mismatch", "unreachable-block".
struct Diagnostic {
  std::string Function;
  std::string Block;
  /// Slot within the block: phis, then body, then terminator.
  std::optional<std::size_t> Slot;
  std::string Rule;
  std::string Message;

  std::string str() const;
};

std::vector<Diagnostic> validateModule(const Module &M);

/// Throws UserError listing the diagnostics when M is not well formed.
void requireValid(const Module &M);

} // namespace predicator

#endif // PREDICATOR_VALIDATOR_H
