#pragma once

// Exact rational arithmetic shared by every module. Breakpoints, periods,
// warp coefficients and fixed points are all Rat.

#include <boost/multiprecision/gmp.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace anonlab {

using Rat = boost::multiprecision::number<boost::multiprecision::gmp_rational, boost::multiprecision::et_off>;
using Int = boost::multiprecision::number<boost::multiprecision::gmp_int, boost::multiprecision::et_off>;

class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parses "num/den", a plain integer, or a finite decimal such as "-0.125".
Rat parse_rat(std::string_view text);

/// Canonical "num/den" text; the denominator is always written, so "3/1".
std::string format_rat(const Rat& r);

Int floor_int(const Rat& r);

/// x reduced into [0, m) for m > 0.
Rat mod_pos(const Rat& x, const Rat& m);

/// r^n for any integer n; r must be nonzero when n < 0.
Rat pow_int(const Rat& r, long n);

/// The exact positive d-th root of r > 0 when it is rational.
std::optional<Rat> rational_root(const Rat& r, unsigned d);

/// Rough log2|r| for r != 0, good to about one unit; used to seed exact searches.
double log2_abs(const Rat& r);

double to_double(const Rat& r);

inline Rat abs_rat(const Rat& r) { return r < 0 ? Rat(-r) : r; }

}  // namespace anonlab
