#pragma once

// Variable-precision binary floats (MPFR) for the transcendental parts.
// Precision is set in bits through PrecisionScope; new values pick it up.

#include "anonlab/rational.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <string>

namespace anonlab {

using BigFloat = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                               boost::multiprecision::et_off>;

constexpr unsigned kDefaultPrecisionBits = 256;

/// Sets the working precision for the lifetime of the scope.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_digits10_;
};

/// Bits actually used by newly created values.
unsigned working_precision_bits();

/// Bits carried by x.
unsigned precision_bits(const BigFloat& x);

/// Correctly rounded conversion at the working precision.
BigFloat to_big(const Rat& r);

/// 2^e exactly.
BigFloat pow2(long e);

/// Decimal text carrying every significant digit of x.
std::string to_decimal(const BigFloat& x);

}  // namespace anonlab
