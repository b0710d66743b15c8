//===-- predicator/Error.h - Error types ------------------------*- C++ -*-===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Exception hierarchy shared by every component. UserError covers bad input
// (malformed IR, wrong bitmask length, missing files) and maps to CLI exit
// status 1. InternalError signals a broken invariant and maps to status 2.
//
//===----------------------------------------------------------------------===//

#ifndef PREDICATOR_ERROR_H
#define PREDICATOR_ERROR_H

#include <cstddef>
#include <stdexcept>
#include <string>

namespace predicator {

class UserError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InternalError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Raised by the IR parser; carries a 1-based source position.
class ParseError : public UserError {
public:
  ParseError(const std::string &Msg, std::size_t Line, std::size_t Column)
      : UserError(std::to_string(Line) + ":" + std::to_string(Column) + ": " +
                  Msg),
        Line(Line), Column(Column) {}

  std::size_t line() const { return Line; }
  std::size_t column() const { return Column; }

private:
  std::size_t Line;
  std::size_t Column;
};

} // namespace predicator

#endif // PREDICATOR_ERROR_H
