#pragma once

// Positive-slope affine time warps t(x) = a*x + c and shifts t(x) = x + b.

#include "anonlab/rational.hpp"

#include <stdexcept>
#include <string>
#include <variant>

namespace anonlab {

struct ShiftWarp;

class AffineWarp {
 public:
  /// Identity.
  AffineWarp() : slope_(1), offset_(0) {}
  /// Throws std::invalid_argument unless slope > 0.
  AffineWarp(Rat slope, Rat offset);
  AffineWarp(const ShiftWarp& s);  // NOLINT: shifts embed into affine warps

  static AffineWarp shift(const Rat& b) { return AffineWarp(Rat(1), b); }
  static AffineWarp scale(const Rat& a) { return AffineWarp(a, Rat(0)); }
  /// x -> a*(x - p) + p, the scaling by a about the point p.
  static AffineWarp scale_about(const Rat& a, const Rat& p) { return AffineWarp(a, p - a * p); }

  const Rat& slope() const { return slope_; }
  const Rat& offset() const { return offset_; }
  bool is_identity() const { return slope_ == 1 && offset_ == 0; }

  Rat operator()(const Rat& x) const { return slope_ * x + offset_; }

  bool operator==(const AffineWarp&) const = default;

  std::string str() const;

 private:
  Rat slope_;
  Rat offset_;
};

struct ShiftWarp {
  Rat b;
  Rat operator()(const Rat& x) const { return x + b; }
  bool operator==(const ShiftWarp&) const = default;
};

inline AffineWarp::AffineWarp(const ShiftWarp& s) : slope_(1), offset_(s.b) {}

Rat apply(const AffineWarp& t, const Rat& x);

/// outer ∘ inner, i.e. x -> outer(inner(x)).
AffineWarp compose(const AffineWarp& outer, const AffineWarp& inner);

AffineWarp invert(const AffineWarp& t);

/// t^n for any integer n (t^0 is the identity).
AffineWarp power(const AffineWarp& t, long n);

struct NoFixedPoint {
  bool operator==(const NoFixedPoint&) const = default;
};
struct EveryPointFixed {
  bool operator==(const EveryPointFixed&) const = default;
};
using FixedPoint = std::variant<Rat, NoFixedPoint, EveryPointFixed>;

/// c/(1-a) when a != 1; NoFixedPoint for a nonzero shift; EveryPointFixed for the identity.
FixedPoint fixed_point(const AffineWarp& t);

class AlgebraError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// s^-1 ∘ tbar ∘ s ∘ tbar^-1, certified to have slope exactly 1.
ShiftWarp commutator(const AffineWarp& s, const AffineWarp& tbar);

/// tbar^-1 ∘ shift(b) ∘ tbar, which is the shift by b / slope(tbar).
ShiftWarp conjugate_shift(const AffineWarp& tbar, const Rat& b);

}  // namespace anonlab
