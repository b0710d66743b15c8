//===-- predicator/Candidate.h - If-conversion candidates -------*- C++ -*-===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef PREDICATOR_CANDIDATE_H
#define PREDICATOR_CANDIDATE_H

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace predicator {

enum class CandidateShape { TriangleTrue, TriangleFalse, Diamond };

std::string_view shapeName(CandidateShape S);

/// One if-convertible branch. A triangle has a single side block on the
/// true (or false) edge while the other edge goes straight to the join; a
/// diamond has a side block on both edges.
struct Candidate {
  /// Bitmask position.
  std::size_t Index = 0;
  /// Branch site id of the head's br.
  std::size_t Site = 0;
  CandidateShape Shape = CandidateShape::TriangleTrue;
  std::string Function;
  std::string Head;
  std::optional<std::string> TrueSide;
  std::optional<std::string> FalseSide;
  std::string Join;
  /// Results of the join phis that become selects.
  std::vector<std::string> Phis;

  /// Join predecessor reached when the condition is true / false.
  const std::string &truePred() const { return TrueSide ? *TrueSide : Head; }
  const std::string &falsePred() const { return FalseSide ? *FalseSide : Head; }

  /// Same shape and blocks; ignores numbering.
  bool sameRegion(const Candidate &O) const {
    return Shape == O.Shape && Head == O.Head && TrueSide == O.TrueSide &&
           FalseSide == O.FalseSide && Join == O.Join;
  }

  friend bool operator==(const Candidate &, const Candidate &) = default;
};

struct Legality {
  bool Legal = false;
  /// Rule ids: shape, critical-edge, multi-pred, side-effect,
  /// speculation-unsafe, phi-not-selectable.
  std::vector<std::string> Reasons;
};

/// Per-candidate convert (1) / keep (0) decisions, one bit per candidate of
/// the whole module in candidate-index order.
struct Bitmask {
  std::vector<bool> Bits;

  std::size_t size() const { return Bits.size(); }
  std::size_t popcount() const;
  /// "10110": character I is bit I.
  std::string str() const;
  static Bitmask parse(std::string_view Text);
  /// Bit I is bit I of Value.
  static Bitmask fromInteger(std::uint64_t Value, std::size_t Width);

  friend bool operator==(const Bitmask &, const Bitmask &) = default;
  friend auto operator<=>(const Bitmask &, const Bitmask &) = default;
};

} // namespace predicator

#endif // PREDICATOR_CANDIDATE_H
