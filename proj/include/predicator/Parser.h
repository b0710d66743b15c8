//===-- predicator/Parser.h - IR text parser --------------------*- C++ -*-===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef PREDICATOR_PARSER_H
#define PREDICATOR_PARSER_H

#include "predicator/IR.h"

#include <string_view>

namespace predicator {

/// Parses the textual IR. Throws ParseError on syntax errors, unknown
/// opcodes, and duplicate function, memory, or block names. Semantic checks
/// (SSA, dominance, phi predecessors) are left to validateModule.
Module parseModule(std::string_view Text);

} // namespace predicator

#endif // PREDICATOR_PARSER_H
