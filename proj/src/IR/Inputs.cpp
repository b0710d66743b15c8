//===-- Inputs.cpp - Workload input files ---------------------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "predicator/Interpreter.h"

#include <charconv>
#include <random>
#include <sstream>

using namespace predicator;

std::vector<std::int64_t> MemoryInit::materialize() const {
  if (!Seed)
    return Cells;
  std::mt19937_64 Rng(*Seed);
  // Modulo reduction keeps the stream identical across standard libraries.
  std::uint64_t Span = static_cast<std::uint64_t>(Hi) -
                       static_cast<std::uint64_t>(Lo) + 1;
  std::vector<std::int64_t> Out(Length);
  for (auto &V : Out) {
    std::uint64_t R = Rng();
    V = static_cast<std::int64_t>(static_cast<std::uint64_t>(Lo) +
                                  (Span == 0 ? R : R % Span));
  }
  return Out;
}

namespace {

std::string trim(std::string_view S) {
  std::size_t B = S.find_first_not_of(" \t\r");
  if (B == std::string_view::npos)
    return {};
  std::size_t E = S.find_last_not_of(" \t\r");
  return std::string(S.substr(B, E - B + 1));
}

template <typename T> T parseInt(std::string_view S, std::size_t Line) {
  std::string Text = trim(S);
  T V{};
  auto [Ptr, Ec] = std::from_chars(Text.data(), Text.data() + Text.size(), V);
  if (Ec != std::errc() || Ptr != Text.data() + Text.size() || Text.empty())
    throw UserError("inputs line " + std::to_string(Line) +
                    ": invalid integer '" + Text + "'");
  return V;
}

MemoryInit parseMemoryInit(std::string_view Rhs, std::size_t Line) {
  MemoryInit Init;
  std::string Text = trim(Rhs);
  if (!Text.empty() && Text.front() == '[') {
    if (Text.back() != ']')
      throw UserError("inputs line " + std::to_string(Line) +
                      ": unterminated cell list");
    std::string_view Body(Text.data() + 1, Text.size() - 2);
    while (!trim(Body).empty()) {
      std::size_t Comma = Body.find(',');
      Init.Cells.push_back(parseInt<std::int64_t>(Body.substr(0, Comma), Line));
      if (Comma == std::string_view::npos)
        break;
      Body.remove_prefix(Comma + 1);
    }
    return Init;
  }
  std::istringstream Fields(Text);
  std::string Field;
  bool HaveSeed = false, HaveRange = false, HaveLen = false;
  while (Fields >> Field) {
    std::size_t Colon = Field.find(':');
    std::string Key = Field.substr(0, Colon);
    std::string_view Value = Colon == std::string::npos
                                 ? std::string_view()
                                 : std::string_view(Field).substr(Colon + 1);
    if (Key == "seed") {
      Init.Seed = parseInt<std::uint64_t>(Value, Line);
      HaveSeed = true;
    } else if (Key == "len") {
      Init.Length = parseInt<std::uint64_t>(Value, Line);
      HaveLen = true;
    } else if (Key == "uniform") {
      if (Value.size() < 2 || Value.front() != '[' || Value.back() != ']')
        throw UserError("inputs line " + std::to_string(Line) +
                        ": expected uniform:[lo,hi]");
      std::string_view Range = Value.substr(1, Value.size() - 2);
      std::size_t Comma = Range.find(',');
      if (Comma == std::string_view::npos)
        throw UserError("inputs line " + std::to_string(Line) +
                        ": expected uniform:[lo,hi]");
      Init.Lo = parseInt<std::int64_t>(Range.substr(0, Comma), Line);
      Init.Hi = parseInt<std::int64_t>(Range.substr(Comma + 1), Line);
      if (Init.Lo > Init.Hi)
        throw UserError("inputs line " + std::to_string(Line) +
                        ": uniform range has lo > hi");
      HaveRange = true;
    } else {
      throw UserError("inputs line " + std::to_string(Line) +
                      ": unknown memory initializer field '" + Key + "'");
    }
  }
  if (!HaveSeed || !HaveRange || !HaveLen)
    throw UserError("inputs line " + std::to_string(Line) +
                    ": seeded initializer needs seed:, uniform: and len:");
  return Init;
}

} // namespace

Inputs predicator::parseInputs(std::string_view Text) {
  Inputs In;
  std::size_t LineNo = 0;
  while (!Text.empty()) {
    ++LineNo;
    std::size_t NL = Text.find('\n');
    std::string_view Line = Text.substr(0, NL);
    Text.remove_prefix(NL == std::string_view::npos ? Text.size() : NL + 1);
    if (std::size_t Hash = Line.find('#'); Hash != std::string_view::npos)
      Line = Line.substr(0, Hash);
    std::string L = trim(Line);
    if (L.empty())
      continue;
    std::size_t Eq = L.find('=');
    std::istringstream Head(L.substr(0, Eq));
    std::string Kind, Name, Extra;
    Head >> Kind >> Name;
    if (Eq == std::string::npos || Name.empty() || (Head >> Extra))
      throw UserError("inputs line " + std::to_string(LineNo) +
                      ": expected 'param <name> = <value>' or 'mem <name> = "
                      "<init>'");
    std::string_view Rhs = std::string_view(L).substr(Eq + 1);
    if (Kind == "param") {
      if (!In.Params.emplace(Name, parseInt<std::int64_t>(Rhs, LineNo)).second)
        throw UserError("inputs line " + std::to_string(LineNo) +
                        ": duplicate param '" + Name + "'");
    } else if (Kind == "mem") {
      if (!In.Memories.emplace(Name, parseMemoryInit(Rhs, LineNo)).second)
        throw UserError("inputs line " + std::to_string(LineNo) +
                        ": duplicate mem '" + Name + "'");
    } else {
      throw UserError("inputs line " + std::to_string(LineNo) +
                      ": unknown directive '" + Kind + "'");
    }
  }
  return In;
}

std::string predicator::printInputs(const Inputs &In) {
  std::ostringstream OS;
  for (const auto &[Name, V] : In.Params)
    OS << "param " << Name << " = " << V << '\n';
  for (const auto &[Name, Init] : In.Memories) {
    OS << "mem " << Name << " = ";
    if (Init.Seed) {
      OS << "seed:" << *Init.Seed << " uniform:[" << Init.Lo << ',' << Init.Hi
         << "] len:" << Init.Length;
    } else {
      OS << '[';
      for (std::size_t I = 0; I < Init.Cells.size(); ++I)
        OS << (I ? "," : "") << Init.Cells[I];
      OS << ']';
    }
    OS << '\n';
  }
  return OS.str();
}
