#include "anonlab/bigfloat.hpp"

#include <cmath>
#include <ios>

namespace anonlab {

namespace {

unsigned digits10_for(unsigned bits) { return static_cast<unsigned>(std::ceil(bits * 0.30103)) + 1; }

}  // namespace

PrecisionScope::PrecisionScope(unsigned bits) : saved_digits10_(BigFloat::default_precision()) {
  if (bits < 16) throw std::invalid_argument("precision below 16 bits");
  BigFloat::default_precision(digits10_for(bits));
}

PrecisionScope::~PrecisionScope() { BigFloat::default_precision(saved_digits10_); }

unsigned working_precision_bits() { return precision_bits(BigFloat(0)); }

unsigned precision_bits(const BigFloat& x) {
  return static_cast<unsigned>(mpfr_get_prec(x.backend().data()));
}

BigFloat to_big(const Rat& r) {
  BigFloat x;
  mpfr_set_q(x.backend().data(), r.backend().data(), MPFR_RNDN);
  return x;
}

BigFloat pow2(long e) {
  BigFloat x(1);
  mpfr_mul_2si(x.backend().data(), x.backend().data(), e, MPFR_RNDN);
  return x;
}

std::string to_decimal(const BigFloat& x) {
  return x.str(static_cast<std::streamsize>(BigFloat::default_precision()) + 2, std::ios_base::scientific);
}

}  // namespace anonlab
