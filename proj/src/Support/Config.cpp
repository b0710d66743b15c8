//===-- Config.cpp - key = value files ------------------------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "predicator/Config.h"
#include "predicator/Error.h"

#include <charconv>

using namespace predicator;

static std::string trim(std::string_view S) {
  std::size_t B = S.find_first_not_of(" \t\r");
  if (B == std::string_view::npos)
    return {};
  std::size_t E = S.find_last_not_of(" \t\r");
  return std::string(S.substr(B, E - B + 1));
}

std::vector<ConfigEntry> predicator::parseConfig(std::string_view Text) {
  std::vector<ConfigEntry> Out;
  std::size_t LineNo = 0;
  while (!Text.empty()) {
    ++LineNo;
    std::size_t NL = Text.find('\n');
    std::string_view Line = Text.substr(0, NL);
    Text.remove_prefix(NL == std::string_view::npos ? Text.size() : NL + 1);
    if (std::size_t Hash = Line.find('#'); Hash != std::string_view::npos)
      Line = Line.substr(0, Hash);
    if (trim(Line).empty())
      continue;
    std::size_t Eq = Line.find('=');
    if (Eq == std::string_view::npos)
      throw UserError("config line " + std::to_string(LineNo) +
                      ": expected 'key = value'");
    ConfigEntry E{trim(Line.substr(0, Eq)), trim(Line.substr(Eq + 1)), LineNo};
    if (E.Key.empty() || E.Value.empty())
      throw UserError("config line " + std::to_string(LineNo) +
                      ": expected 'key = value'");
    Out.push_back(std::move(E));
  }
  return Out;
}

unsigned predicator::configUnsigned(const ConfigEntry &E) {
  unsigned V = 0;
  const char *End = E.Value.data() + E.Value.size();
  auto [Ptr, Ec] = std::from_chars(E.Value.data(), End, V);
  if (Ec != std::errc() || Ptr != End)
    throw UserError("config line " + std::to_string(E.Line) + ": '" + E.Key +
                    "' expects a non-negative integer, got '" + E.Value + "'");
  return V;
}

double predicator::configReal(const ConfigEntry &E) {
  double V = 0;
  const char *End = E.Value.data() + E.Value.size();
  auto [Ptr, Ec] = std::from_chars(E.Value.data(), End, V);
  if (Ec != std::errc() || Ptr != End)
    throw UserError("config line " + std::to_string(E.Line) + ": '" + E.Key +
                    "' expects a number, got '" + E.Value + "'");
  return V;
}
