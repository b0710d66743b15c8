//===-- predicator/Config.h - key = value files -----------------*- C++ -*-===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef PREDICATOR_CONFIG_H
#define PREDICATOR_CONFIG_H

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace predicator {

struct ConfigEntry {
  std::string Key;
  std::string Value;
  std::size_t Line = 0;
};

/// Splits `key = value` lines; '#' comments and blank lines are skipped.
std::vector<ConfigEntry> parseConfig(std::string_view Text);

unsigned configUnsigned(const ConfigEntry &E);
double configReal(const ConfigEntry &E);

} // namespace predicator

#endif // PREDICATOR_CONFIG_H
