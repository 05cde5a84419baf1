#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "anonlab/fpath.hpp"

#include <set>
#include <tuple>

using namespace anonlab;

namespace {

BigFloat big(long n, long d = 1) { return to_big(Rat(n, d)); }

const FElement kUnit{{Rat(0), Rat(0)}, {Rat(1), Rat(1)}};

// Solves s(u) = y in closed form: with L = ln(1/y - 1), L u^2 - (L + 2) u + 1 = 0.
BigFloat s_inverse_oracle(const BigFloat& y) {
  BigFloat L = log(1 / y - 1);
  if (L == 0) return big(1, 2);
  return ((L + 2) - sqrt(L * L + 4)) / (2 * L);
}

}  // namespace

TEST_CASE("moves") {
  PrecisionScope scope(256);
  CHECK(f_apply({kUnit, Direction::forward}, big(0)) == 0);
  CHECK(f_apply({kUnit, Direction::forward}, big(1)) == 1);
  CHECK(abs(f_apply({kUnit, Direction::forward}, big(1, 2)) - big(1, 2)) < pow2(-240));
  FElement wide{{Rat(1), Rat(2)}, {Rat(3), Rat(6)}};
  CHECK(abs(f_apply({wide, Direction::forward}, big(2)) - big(4)) < pow2(-240));
  CHECK(abs(f_apply({wide, Direction::inverse}, big(4)) - big(2)) < pow2(-200));
  CHECK_THROWS_AS(f_apply({kUnit, Direction::forward}, big(3, 2)), DomainError);
  CHECK_THROWS_AS(f_apply({wide, Direction::inverse}, big(1)), DomainError);

  for (long n = 1; n < 10; ++n) {
    BigFloat y = big(n, 10);
    BigFloat u = f_apply({kUnit, Direction::inverse}, y);
    CHECK(abs(u - s_inverse_oracle(y)) < pow2(-190));
  }
}

TEST_CASE("witness checks, reversal and concatenation") {
  PrecisionScope scope(256);
  const BigFloat tol = pow2(-200);
  FElement e2{{Rat(0), Rat(1)}, {Rat(2), Rat(3)}};
  BigFloat x0 = big(1, 3);
  BigFloat x1 = f_apply({kUnit, Direction::forward}, x0);
  BigFloat x2 = f_apply({e2, Direction::inverse}, x1 + 1);
  FPathWitness w1{{x0, x1}, {{kUnit, Direction::forward}}};
  CHECK(verify_witness(w1, tol));
  FPathWitness bad = w1;
  bad.points[1] += pow2(-20);
  CHECK_FALSE(verify_witness(bad, tol));
  FPathWitness single{{x0}, {}};
  CHECK(verify_witness(single, tol));

  FPathWitness w2{{x1 + 1, x2}, {{e2, Direction::inverse}}};
  CHECK(verify_witness(w2, tol));
  FPathWitness r = reverse_witness(w2);
  CHECK(r.points.front() == x2);
  CHECK(r.moves.front().dir == Direction::forward);
  CHECK(verify_witness(r, tol));
  CHECK(verify_witness(reverse_witness(reverse_witness(w1)), tol));

  CHECK_THROWS_AS(concat_witnesses(w1, w2, tol), std::invalid_argument);
  FPathWitness w3{{x1, x1}, {}};
  FPathWitness joined = concat_witnesses(w1, reverse_witness(w1), tol);
  CHECK(joined.points.size() == 3);
  CHECK(joined.moves.size() == 2);
  CHECK(verify_witness(joined, tol));
  (void)w3;
}

TEST_CASE("enumeration") {
  auto one = enumerate_f(1);
  CHECK(one.size() == 9);
  bool has_unit = false;
  for (const auto& e : one) has_unit = has_unit || e == kUnit;
  CHECK(has_unit);
  std::size_t prev = one.size();
  for (unsigned b = 2; b <= 3; ++b) {
    auto cur = enumerate_f(b);
    CHECK(cur.size() >= prev);
    prev = cur.size();
    std::set<std::tuple<Rat, Rat, Rat, Rat>> seen;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      auto key = std::make_tuple(cur[i].a.p, cur[i].a.q, cur[i].b.p, cur[i].b.q);
      CHECK(seen.insert(key).second);
      CHECK(cur[i].a.p < cur[i].b.p);
      CHECK(cur[i].a.q < cur[i].b.q);
      if (i > 0) {
        auto last = std::make_tuple(cur[i - 1].a.p, cur[i - 1].a.q, cur[i - 1].b.p, cur[i - 1].b.q);
        CHECK(last < key);
      }
    }
  }
}

TEST_CASE("witnesses for the smooth warp") {
  PrecisionScope scope(256);
  const BigFloat tol = pow2(-200);
  SmoothWarpSpec spec = build_warp(Rat(0), Rat(0), 20);
  for (const Rat& x : {Rat(-1, 3), Rat(-5, 2), Rat(-1, 20), Rat(-7, 8)}) {
    FPathWitness w = witness_for_warp(spec, to_big(x));
    CHECK(w.moves.size() == 1);
    CHECK(w.points.front() == to_big(x));
    CHECK(abs(w.points.back() - warp_eval(spec, to_big(x))) <= tol);
    CHECK(verify_witness(w, tol));
  }
  CHECK_THROWS_AS(witness_for_warp(spec, big(0)), DomainError);
  CHECK_THROWS_AS(witness_for_warp(spec, big(1)), DomainError);
  CHECK_THROWS_AS(witness_for_warp(spec, -big(1, 1000)), DomainError);
}

TEST_CASE("search and json") {
  PrecisionScope scope(256);
  const BigFloat tol = pow2(-200);
  BigFloat x = big(1, 4);
  BigFloat y = f_apply({kUnit, Direction::forward}, x);
  auto found = search_path(x, y, enumerate_f(1), 2, tol);
  REQUIRE(found.has_value());
  CHECK(verify_witness(*found, tol));
  CHECK(abs(found->points.back() - y) <= tol);
  CHECK(search_path(x, x, {}, 0, tol).has_value());

  FPathWitness w{{x, y}, {{kUnit, Direction::forward}}};
  FPathWitness back = witness_from_json(to_json(w));
  REQUIRE(back.points.size() == 2);
  CHECK(back.moves == w.moves);
  CHECK(abs(back.points[1] - y) <= tol);
  CHECK(verify_witness(back, tol));
  nlohmann::json j = to_json(w);
  j["moves"][0]["direction"] = "sideways";
  CHECK_THROWS_AS(witness_from_json(j), ParseError);
}
