#pragma once

// The flat bump h(x) = exp(-1/x), the transition s(x) = h(x) / (h(x) + h(1-x)),
// its rescaled copies s_AB, and a strictly increasing warp t glued from them
// whose pieces shrink toward w from the left, so t is flat at w from the left.

#include "anonlab/bigfloat.hpp"
#include "anonlab/rational.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace anonlab {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

BigFloat h(const BigFloat& x);

/// Integer coefficients of R_k, lowest degree first, with
/// h^(k)(x) = exp(-1/x) R_k(1/x) for x > 0.
std::vector<Int> h_deriv_poly(unsigned k);

BigFloat eval_poly(const std::vector<Int>& coeffs, const BigFloat& u);

/// Truncated Taylor series: c[j] = f^(j)(x0) / j!.
class Jet {
 public:
  Jet() = default;
  explicit Jet(std::vector<BigFloat> coeffs) : c_(std::move(coeffs)) {}
  static Jet constant(const BigFloat& v, unsigned order);
  /// x0 + (x - x0): the identity function expanded at x0.
  static Jet variable(const BigFloat& x0, unsigned order);

  unsigned order() const { return static_cast<unsigned>(c_.size()) - 1; }
  const BigFloat& operator[](std::size_t j) const { return c_.at(j); }
  const std::vector<BigFloat>& coeffs() const { return c_; }
  /// f^(j)(x0) = j! c[j].
  BigFloat derivative(unsigned j) const;

  friend Jet operator+(const Jet& a, const Jet& b);
  friend Jet operator-(const Jet& a, const Jet& b);
  friend Jet operator*(const Jet& a, const Jet& b);
  /// Requires b[0] != 0.
  friend Jet operator/(const Jet& a, const Jet& b);

 private:
  std::vector<BigFloat> c_;
};

/// Jet of h at x: exact zeros for x <= 0, otherwise from R_k.
Jet h_jet(const BigFloat& x, unsigned order);

/// Throws DomainError outside [0, 1].
BigFloat s(const BigFloat& x);
Jet s_jet(const BigFloat& x, unsigned order);

struct Point {
  Rat p, q;
  bool operator==(const Point&) const = default;
};

/// s_AB on [A.p, B.p], rising from A.q to B.q.
struct TransitionFn {
  Point a, b;
  TransitionFn(Point a_, Point b_);
  bool operator==(const TransitionFn&) const = default;
};

BigFloat s_ab(const TransitionFn& t, const BigFloat& x);
BigFloat s_ab_deriv(const TransitionFn& t, const BigFloat& x, unsigned k);

struct DerivBound {
  unsigned k = 0;
  unsigned grid_depth = 0;
  BigFloat grid_max;     // max of |s^(k)| over the dyadic grid j / 2^depth
  BigFloat safety = 2;
  BigFloat bound() const { return grid_max * safety; }
};

DerivBound max_deriv_bound(unsigned k, unsigned grid_depth);

/// Anchors of the warp: A_i = (p_i, q_i) for i = first_index..N+1 with p_i -> w,
/// B_i = (w + i, z + i).
struct SmoothWarpSpec {
  Rat w, z;
  unsigned depth = 0;
  long first_index = 0;  // index of ps.front(), negative
  std::vector<Rat> ps, qs;

  const Rat& p(long i) const { return ps.at(static_cast<std::size_t>(i - first_index)); }
  const Rat& q(long i) const { return qs.at(static_cast<std::size_t>(i - first_index)); }
  long last_index() const { return first_index + static_cast<long>(ps.size()) - 1; }
  Point anchor(long i) const { return {p(i), q(i)}; }
  Point right_anchor(long i) const { return {w + i, z + i}; }
};

/// p_i = w - 1/(i+2), q_i = z - (p_{i+1} - p_i)^i / (2i), q_0 = z - 1/2, unit
/// steps below index 0. Requires depth >= 2. Throws std::logic_error if a
/// generated sequence breaks its invariants.
SmoothWarpSpec build_warp(const Rat& w, const Rat& z, unsigned depth);

/// Exact check of (q_{i+1} - q_i) / (p_{i+1} - p_i)^i < 1/i and
/// z - q_i < (p_{i+1} - p_i)^i / i for 0 < i < depth; returns the failing i's.
std::vector<long> pq_bound_failures(const SmoothWarpSpec& spec);

/// The piece of the warp holding x. Unit-shifted copies cover everything
/// below p_0 and at or above w; x in [p_{N+1}, w) lies past the truncation.
TransitionFn piece_at(const SmoothWarpSpec& spec, const BigFloat& x);

BigFloat warp_eval(const SmoothWarpSpec& spec, const BigFloat& x);

struct FlatnessReport {
  struct Piece {
    long index;
    std::vector<BigFloat> max_abs_deriv;  // k = 1..kmax over the samples
    std::vector<BigFloat> margin;         // M_k / i - max, for k <= i
  };
  struct Violation {
    long index;
    unsigned k;
    std::string what;
  };
  unsigned kmax = 0;
  unsigned precision_bits = 0;
  unsigned samples_per_piece = 0;
  std::vector<DerivBound> bounds;
  std::vector<Piece> pieces;
  std::vector<long> pq_failures;
  /// (z - q_i) / (w - p_i), the left difference quotients at w, i = 0..N+1.
  std::vector<BigFloat> left_quotients;
  bool left_trend_ok = false;  // last five strictly decreasing and below 1e-20
  bool right_flat = false;     // one-sided derivatives at w from the right vanish
  bool monotone = false;       // samples strictly increase across every seam
  bool seams_flat = false;     // one-sided derivatives vanish on both sides of every seam
  std::vector<Violation> violations;
  bool passed() const;
};

FlatnessReport verify_flatness(const SmoothWarpSpec& spec, unsigned kmax, unsigned samples_per_piece = 16,
                               unsigned grid_depth = 10);

}  // namespace anonlab
