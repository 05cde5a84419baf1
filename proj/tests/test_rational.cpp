#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "anonlab/rational.hpp"

using namespace anonlab;

TEST_CASE("parse and format") {
  CHECK(parse_rat("3/6") == Rat(1, 2));
  CHECK(parse_rat("-7") == Rat(-7));
  CHECK(parse_rat("-0.125") == Rat(-1, 8));
  CHECK(parse_rat("2.5") == Rat(5, 2));
  CHECK(parse_rat("4/-8") == Rat(-1, 2));
  CHECK(format_rat(Rat(3)) == "3/1");
  CHECK(format_rat(Rat(-2, 4)) == "-1/2");
  CHECK(parse_rat(format_rat(Rat(22, 7))) == Rat(22, 7));
}

TEST_CASE("parse rejects junk") {
  CHECK_THROWS_AS(parse_rat(""), ParseError);
  CHECK_THROWS_AS(parse_rat("1/0"), ParseError);
  CHECK_THROWS_AS(parse_rat("abc"), ParseError);
  CHECK_THROWS_AS(parse_rat("1.-5"), ParseError);
  CHECK_THROWS_AS(parse_rat("1/2/3"), ParseError);
}

TEST_CASE("floor and mod") {
  CHECK(floor_int(Rat(7, 2)) == 3);
  CHECK(floor_int(Rat(-7, 2)) == -4);
  CHECK(floor_int(Rat(-4)) == -4);
  CHECK(mod_pos(Rat(7, 4), Rat(1)) == Rat(3, 4));
  CHECK(mod_pos(Rat(-1, 4), Rat(1)) == Rat(3, 4));
  CHECK(mod_pos(Rat(-3, 2), Rat(3, 2)) == 0);
}

TEST_CASE("powers and roots") {
  CHECK(pow_int(Rat(2, 3), 3) == Rat(8, 27));
  CHECK(pow_int(Rat(2, 3), -2) == Rat(9, 4));
  CHECK(pow_int(Rat(5), 0) == 1);
  CHECK(rational_root(Rat(8, 27), 3) == Rat(2, 3));
  CHECK(rational_root(Rat(4), 2) == Rat(2));
  CHECK_FALSE(rational_root(Rat(2), 2).has_value());
  CHECK(log2_abs(Rat(1, 1024)) == doctest::Approx(-10).epsilon(0.2));
  CHECK(to_double(Rat(-3, 4)) == -0.75);
}
