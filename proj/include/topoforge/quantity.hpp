#pragma once

// Exact arithmetic for metric values and multipliers.
//
// Metric values (delay, additive loss, bounds) are stored as 64-bit
// fixed-point "ticks" with a global scale of 2^-kTickBits, so path sums and
// equality tests are exact. Lagrangian multipliers are arbitrary-precision
// rationals; combined arc weights r1 + lambda * r2 are compared as integers
// after clearing the multiplier's denominator.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "topoforge/error.hpp"

namespace topoforge {

using Ticks = std::int64_t;
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline constexpr int kTickBits = 30;
// Largest accepted metric value. Keeps any simple path of up to 512 arcs
// inside int64 ticks.
inline constexpr double kMaxMetricValue = 16777216.0;  // 2^24
inline constexpr Ticks kUnboundedTicks = std::numeric_limits<Ticks>::max();

// Arc metric values round to the nearest tick.
inline Ticks value_to_ticks(double v) {
  if (!std::isfinite(v) || v < 0.0 || v > kMaxMetricValue) {
    throw InvalidInputError("metric value out of range: " + std::to_string(v));
  }
  return static_cast<Ticks>(std::llround(std::ldexp(v, kTickBits)));
}

// Bounds round down, so a tick-level check never accepts a path that exceeds
// the real-valued bound.
inline Ticks bound_to_ticks(double v) {
  if (std::isinf(v) && v > 0) return kUnboundedTicks;
  if (!std::isfinite(v) || v < 0.0) {
    throw InvalidInputError("bound out of range: " + std::to_string(v));
  }
  const double scaled = std::floor(std::ldexp(v, kTickBits));
  if (scaled >= 9.2e18) return kUnboundedTicks;
  return static_cast<Ticks>(scaled);
}

inline double ticks_to_value(Ticks t) {
  if (t == kUnboundedTicks) return std::numeric_limits<double>::infinity();
  return std::ldexp(static_cast<double>(t), -kTickBits);
}

// Exact conversion: every finite double is a dyadic rational.
inline Rational rational_from_double(double v) {
  if (!std::isfinite(v)) throw InvalidInputError("non-finite multiplier");
  int exp = 0;
  const double mant = std::frexp(v, &exp);
  // mant in [0.5, 1): 53 significant bits.
  const auto scaled = static_cast<std::int64_t>(std::ldexp(mant, 53));
  exp -= 53;
  BigInt num = scaled;
  BigInt den = 1;
  if (exp >= 0) {
    num <<= exp;
  } else {
    den <<= -exp;
  }
  return Rational(num, den);
}

inline double to_double(const Rational& r) {
  return r.convert_to<double>();
}

inline std::string to_string(const Rational& r) { return r.str(); }

// Accepts "p", "p/q" or a decimal literal (converted exactly from double).
inline Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      BigInt num(text.substr(0, slash));
      BigInt den(text.substr(slash + 1));
      if (den == 0) throw InvalidInputError("zero denominator: " + text);
      return Rational(num, den);
    }
    if (text.find_first_of(".eE") != std::string::npos) {
      return rational_from_double(std::stod(text));
    }
    return Rational(BigInt(text));
  } catch (const InvalidInputError&) {
    throw;
  } catch (const std::exception&) {
    throw InvalidInputError("malformed rational: " + text);
  }
}

}  // namespace topoforge
