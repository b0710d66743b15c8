//===-- Rational.cpp - Exact rational numbers -----------------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "predicator/Rational.h"
#include "predicator/Error.h"

#include <numeric>

using namespace predicator;

namespace {
using Wide = __int128;

Rational fromWide(Wide Num, Wide Den) {
  if (Den == 0)
    throw InternalError("rational with zero denominator");
  if (Den < 0) {
    Num = -Num;
    Den = -Den;
  }
  Wide A = Num < 0 ? -Num : Num, B = Den;
  while (B != 0) {
    Wide T = A % B;
    A = B;
    B = T;
  }
  if (A > 1) {
    Num /= A;
    Den /= A;
  }
  constexpr Wide Max = INT64_MAX, Min = INT64_MIN;
  if (Num > Max || Num < Min || Den > Max)
    throw InternalError("rational overflow");
  return Rational(static_cast<std::int64_t>(Num),
                  static_cast<std::int64_t>(Den));
}
} // namespace

Rational::Rational(std::int64_t N, std::int64_t D) {
  if (D == 0)
    throw InternalError("rational with zero denominator");
  if (D < 0) {
    N = -N;
    D = -D;
  }
  std::int64_t G = std::gcd(N, D);
  Num = G > 1 ? N / G : N;
  Den = G > 1 ? D / G : D;
}

std::string Rational::toFixed(int Digits) const {
  Wide Scale = 1;
  for (int I = 0; I < Digits; ++I)
    Scale *= 10;
  bool Negative = Num < 0;
  Wide Abs = Negative ? -static_cast<Wide>(Num) : static_cast<Wide>(Num);
  Wide Scaled = (Abs * Scale * 2 + Den) / (static_cast<Wide>(Den) * 2);
  Wide IntPart = Scaled / Scale, Frac = Scaled % Scale;
  std::string FracText = std::to_string(static_cast<long long>(Frac));
  FracText.insert(0, Digits - FracText.size(), '0');
  std::string Out = Negative && Scaled != 0 ? "-" : "";
  Out += std::to_string(static_cast<long long>(IntPart));
  if (Digits > 0)
    Out += "." + FracText;
  return Out;
}

namespace predicator {

Rational operator+(const Rational &A, const Rational &B) {
  return fromWide(Wide(A.Num) * B.Den + Wide(B.Num) * A.Den,
                  Wide(A.Den) * B.Den);
}

Rational operator-(const Rational &A, const Rational &B) {
  return fromWide(Wide(A.Num) * B.Den - Wide(B.Num) * A.Den,
                  Wide(A.Den) * B.Den);
}

Rational operator*(const Rational &A, const Rational &B) {
  return fromWide(Wide(A.Num) * B.Num, Wide(A.Den) * B.Den);
}

Rational operator/(const Rational &A, const Rational &B) {
  return fromWide(Wide(A.Num) * B.Den, Wide(A.Den) * B.Num);
}

std::strong_ordering operator<=>(const Rational &A, const Rational &B) {
  return Wide(A.Num) * B.Den <=> Wide(B.Num) * A.Den;
}

} // namespace predicator
