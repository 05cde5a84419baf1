#include "anonlab/timewarp.hpp"

#include <stdexcept>

namespace anonlab {

AffineWarp::AffineWarp(Rat slope, Rat offset) : slope_(std::move(slope)), offset_(std::move(offset)) {
  if (slope_ <= 0) throw std::invalid_argument("affine warp slope must be positive, got " + format_rat(slope_));
}

std::string AffineWarp::str() const { return format_rat(slope_) + "*x+" + format_rat(offset_); }

Rat apply(const AffineWarp& t, const Rat& x) { return t(x); }

AffineWarp compose(const AffineWarp& outer, const AffineWarp& inner) {
  // a2*(a1*x + c1) + c2
  return AffineWarp(outer.slope() * inner.slope(), outer.slope() * inner.offset() + outer.offset());
}

AffineWarp invert(const AffineWarp& t) {
  Rat inv = Rat(1) / t.slope();
  return AffineWarp(inv, -t.offset() * inv);
}

AffineWarp power(const AffineWarp& t, long n) {
  if (n < 0) return power(invert(t), -n);
  AffineWarp result;
  AffineWarp base = t;
  while (n > 0) {
    if (n & 1) result = compose(base, result);
    base = compose(base, base);
    n >>= 1;
  }
  return result;
}

FixedPoint fixed_point(const AffineWarp& t) {
  if (t.slope() != 1) return Rat(t.offset() / (Rat(1) - t.slope()));
  if (t.offset() != 0) return NoFixedPoint{};
  return EveryPointFixed{};
}

ShiftWarp commutator(const AffineWarp& s, const AffineWarp& tbar) {
  AffineWarp m = compose(invert(s), compose(tbar, compose(s, invert(tbar))));
  if (m.slope() != 1) throw AlgebraError("commutator of affine warps has slope " + format_rat(m.slope()));
  return ShiftWarp{m.offset()};
}

ShiftWarp conjugate_shift(const AffineWarp& tbar, const Rat& b) {
  AffineWarp m = compose(invert(tbar), compose(AffineWarp::shift(b), tbar));
  if (m.slope() != 1) throw AlgebraError("conjugated shift has slope " + format_rat(m.slope()));
  return ShiftWarp{m.offset()};
}

}  // namespace anonlab
