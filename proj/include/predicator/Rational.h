//===-- predicator/Rational.h - Exact rational numbers ----------*- C++ -*-===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef PREDICATOR_RATIONAL_H
#define PREDICATOR_RATIONAL_H

#include <compare>
#include <cstdint>
#include <string>

namespace predicator {

/// Normalized fraction over int64. The denominator is always positive and
/// gcd(num, den) == 1, so defaulted equality is value equality.
class Rational {
public:
  constexpr Rational() = default;
  Rational(std::int64_t Num, std::int64_t Den = 1);

  std::int64_t num() const { return Num; }
  std::int64_t den() const { return Den; }

  double toDouble() const { return static_cast<double>(Num) / Den; }

  /// Decimal rendering rounded half away from zero, e.g. "1.500000".
  std::string toFixed(int Digits = 6) const;

  friend Rational operator+(const Rational &A, const Rational &B);
  friend Rational operator-(const Rational &A, const Rational &B);
  friend Rational operator*(const Rational &A, const Rational &B);
  friend Rational operator/(const Rational &A, const Rational &B);

  friend bool operator==(const Rational &A, const Rational &B) = default;
  friend std::strong_ordering operator<=>(const Rational &A,
                                          const Rational &B);

private:
  std::int64_t Num = 0;
  std::int64_t Den = 1;
};

} // namespace predicator

#endif // PREDICATOR_RATIONAL_H
