#pragma once

// Chains of transitions s_AB with rational endpoints. Two reals joined by such
// a chain, each step applying some s_AB or its inverse, share a class. Class
// equality is only ever claimed through an explicit witness chain.

#include "anonlab/bigfloat.hpp"
#include "anonlab/smooth.hpp"

#include <json.hpp>

#include <cstddef>
#include <optional>
#include <vector>

namespace anonlab {

/// s_AB with A, B rational pairs, B above and to the right of A.
struct FElement {
  Point a, b;
  TransitionFn fn() const { return TransitionFn(a, b); }
  bool operator==(const FElement&) const = default;
};

enum class Direction { forward, inverse };

struct FMove {
  FElement elem;
  Direction dir = Direction::forward;
  bool operator==(const FMove&) const = default;
};

struct FPathWitness {
  std::vector<BigFloat> points;  // x_1 .. x_n, n >= 1
  std::vector<FMove> moves;      // n - 1 moves, moves[i] takes points[i] to points[i+1]
};

/// s_AB(x) forward, s_AB^-1(x) inverse by bisection to the working precision.
/// Throws DomainError when x is outside the move's domain.
BigFloat f_apply(const FMove& m, const BigFloat& x);

/// Every step checked as |s_AB(x_i) - x_{i+1}| <= tol forward and
/// |s_AB(x_{i+1}) - x_i| <= tol inverse, with the inputs inside the domains.
bool verify_witness(const FPathWitness& wit, const BigFloat& tol);

FPathWitness reverse_witness(const FPathWitness& wit);

/// Throws std::invalid_argument when the endpoints differ by more than tol.
FPathWitness concat_witnesses(const FPathWitness& w1, const FPathWitness& w2, const BigFloat& tol);

/// All elements whose four rationals have |numerator| <= bound and
/// denominator <= bound, sorted by (p1, q1, p2, q2).
std::vector<FElement> enumerate_f(unsigned bound);

/// The single forward move (x, t(x)) through the piece of the warp holding
/// x < w. Throws DomainError for x >= w or x past the truncation.
FPathWitness witness_for_warp(const SmoothWarpSpec& spec, const BigFloat& x);

/// Breadth-first search for a chain from x to y of at most max_moves moves
/// over the given elements, keeping at most max_frontier points per level.
/// Finding nothing proves nothing.
std::optional<FPathWitness> search_path(const BigFloat& x, const BigFloat& y, const std::vector<FElement>& elems,
                                        unsigned max_moves, const BigFloat& tol, std::size_t max_frontier = 4096);

/// Points as full-precision decimal strings, moves as rational quadruples.
nlohmann::json to_json(const FPathWitness& wit);
FPathWitness witness_from_json(const nlohmann::json& j);

}  // namespace anonlab
