#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "anonlab/timewarp.hpp"

#include <random>

using namespace anonlab;

namespace {

AffineWarp lin(long a_num, long a_den, long c_num, long c_den) { return AffineWarp(Rat(a_num, a_den), Rat(c_num, c_den)); }

}  // namespace

TEST_CASE("apply") {
  CHECK(apply(AffineWarp::shift(Rat(2)), Rat(3)) == 5);
  CHECK(apply(AffineWarp::scale(Rat(2)), Rat(1, 2)) == 1);
  CHECK(apply(AffineWarp(), Rat(-7, 3)) == Rat(-7, 3));
  CHECK_THROWS_AS(AffineWarp(Rat(0), Rat(1)), std::invalid_argument);
  CHECK_THROWS_AS(AffineWarp(Rat(-1), Rat(1)), std::invalid_argument);
}

TEST_CASE("compose and invert") {
  CHECK(compose(AffineWarp::scale(Rat(2)), AffineWarp::shift(Rat(1))) == lin(2, 1, 2, 1));
  AffineWarp t = lin(3, 2, -1, 5);
  CHECK(compose(t, AffineWarp()) == t);
  CHECK(compose(AffineWarp::shift(Rat(1, 3)), AffineWarp::shift(Rat(1, 6))) == AffineWarp::shift(Rat(1, 2)));
  CHECK(invert(lin(2, 1, 2, 1)) == lin(1, 2, -1, 1));
  CHECK(invert(AffineWarp::shift(Rat(4))) == AffineWarp::shift(Rat(-4)));
  CHECK(invert(AffineWarp()).is_identity());
  CHECK(power(lin(2, 1, 1, 1), 3)(Rat(0)) == 7);
  CHECK(power(lin(2, 1, 0, 1), -1)(Rat(3)) == Rat(3, 2));
  CHECK(power(t, 0).is_identity());
}

TEST_CASE("fixed points") {
  CHECK(std::get<Rat>(fixed_point(lin(2, 1, 1, 1))) == -1);
  CHECK(std::holds_alternative<NoFixedPoint>(fixed_point(AffineWarp::shift(Rat(3)))));
  CHECK(std::holds_alternative<EveryPointFixed>(fixed_point(AffineWarp())));
}

TEST_CASE("commutator and conjugate shift") {
  CHECK(commutator(AffineWarp::scale(Rat(2)), AffineWarp::shift(Rat(1))).b == Rat(-1, 2));
  CHECK(commutator(AffineWarp::shift(Rat(2)), AffineWarp::shift(Rat(-5))).b == 0);
  CHECK(commutator(AffineWarp(), lin(7, 3, 1, 9)).b == 0);
  CHECK(conjugate_shift(AffineWarp::scale(Rat(2)), Rat(1)).b == Rat(1, 2));
  CHECK(conjugate_shift(AffineWarp::shift(Rat(5)), Rat(3, 4)).b == Rat(3, 4));
  CHECK(conjugate_shift(AffineWarp::scale(Rat(1, 3)), Rat(3)).b == 9);
}

TEST_CASE("group laws on random warps") {
  std::mt19937_64 eng(7);
  auto r = [&](long lo, long hi) { return lo + static_cast<long>(eng() % static_cast<unsigned long>(hi - lo + 1)); };
  auto warp = [&] { return AffineWarp(Rat(r(1, 9), r(1, 9)), Rat(r(-9, 9), r(1, 9))); };
  for (int i = 0; i < 300; ++i) {
    AffineWarp a = warp(), b = warp(), c = warp();
    CHECK(compose(a, compose(b, c)) == compose(compose(a, b), c));
    CHECK(compose(a, invert(a)).is_identity());
    CHECK(compose(invert(a), a).is_identity());
    Rat x(r(-20, 20), r(1, 7));
    CHECK(compose(a, b)(x) == a(b(x)));
    // The slope of s^-1 tbar s tbar^-1 is 1, so its offset is its value at 0.
    ShiftWarp k = commutator(a, b);
    CHECK(invert(a)(b(a(invert(b)(Rat(0))))) == k.b);
    if (!(a.slope() == 1 && a.offset() == 0)) {
      auto fp = fixed_point(a);
      if (a.slope() != 1) CHECK(a(std::get<Rat>(fp)) == std::get<Rat>(fp));
    }
  }
}
