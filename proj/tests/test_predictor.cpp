#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "anonlab/harness.hpp"
#include "anonlab/predictor.hpp"

using namespace anonlab;

namespace {

const State A{"A"}, B{"B"};

Scenario c_a() { return Scenario::constant(A); }
Scenario c_b() { return Scenario::constant(B); }
Scenario p0() { return Scenario::periodic(Rat(1), {Rat(0), Rat(1, 2)}, {A, B}); }
Scenario s1() { return Scenario::step({Rat(0)}, {A, B}); }

std::vector<Rat> cuts() {
  std::vector<Rat> out;
  for (long k = -8; k <= 8; ++k) out.push_back(Rat(k, 4));
  return out;
}

}  // namespace

TEST_CASE("tiers") {
  CHECK(tier_of(c_a()) == Tier::periodic);
  CHECK(tier_of(p0()) == Tier::periodic);
  CHECK(tier_of(s1()) == Tier::affine_invariant);
  CHECK(tier_of(Scenario::step({Rat(0), Rat(1)}, {A, B, A})) == Tier::other);
  CHECK(to_string(Tier::affine_invariant) == "affineInvariant");
  CHECK(parse_mode("ht") == Mode::ht);
  CHECK_THROWS(parse_mode("t3"));
}

TEST_CASE("catalog validation") {
  CHECK_THROWS_AS(Catalog({c_a(), c_a()}), std::invalid_argument);
  CHECK_THROWS_AS(Catalog({s1(), c_a()}), std::invalid_argument);
  CHECK_NOTHROW(Catalog({c_a(), p0(), s1()}));
}

TEST_CASE("ht predictor on the one-jump example") {
  Catalog cat({c_a(), s1()});
  Guess g = ht_predict(cat, past_view(s1(), Rat(-1)));
  CHECK(g.witness_index == 0);
  CHECK(g.state == A);
  g = ht_predict(cat, past_view(s1(), Rat(0)));
  CHECK(g.witness_index == 0);
  CHECK(g.state == A);
  g = ht_predict(cat, past_view(s1(), Rat(1, 2)));
  CHECK(g.witness_index == 1);
  CHECK(g.state == B);
  Catalog only_b({c_b()});
  CHECK_THROWS_AS(ht_predict(only_b, past_view(s1(), Rat(0))), NoConsistentEntry);
}

TEST_CASE("t2 predictor on the one-jump example") {
  Catalog cat({c_a(), p0(), s1()});
  CHECK_THROWS_AS(t2_predict(cat, past_view(s1(), Rat(0))), ClosureViolation);
  cat.certify(cuts());
  CHECK(cat.closure_certified());

  Guess g = t2_predict(cat, past_view(s1(), Rat(-1)));
  CHECK(g.witness_index == 0);
  CHECK(g.state == A);
  g = t2_predict(cat, past_view(s1(), Rat(0)));
  CHECK(g.witness_index == 0);
  CHECK(g.state == A);
  g = t2_predict(cat, past_view(s1(), Rat(1, 2)));
  CHECK(g.witness_index == 2);
  CHECK(g.state == B);

  // Any scaling about the jump gives the same guess.
  for (const Rat& a : {Rat(1, 2), Rat(1), Rat(3)}) {
    AffineWarp t = AffineWarp::scale(a);
    CHECK(restrict_eq(s1(), compose_warp(s1(), t), Rat(1, 2)));
    CHECK(eval(s1(), t(Rat(1, 2))) == B);
  }
  WellDefinednessReport wd = well_definedness_check(cat, past_view(s1(), Rat(1, 2)), 8);
  CHECK(wd.index == 2);
  CHECK(wd.warps.size() >= 2);
  CHECK(wd.agree());

  ErrorSetReport r = error_set(cat, s1(), {Rat(-2), Rat(-1), Rat(0), Rat(1, 2), Rat(1)}, Mode::t2);
  REQUIRE(r.errors.size() == 1);
  CHECK(r.agents[r.errors[0]] == 0);
  CHECK(error_set_violations(r, cat.size()).empty());
  for (std::size_t i = 1; i < r.index_trace.size(); ++i) CHECK(r.index_trace[i - 1] <= r.index_trace[i]);
}

TEST_CASE("first entry as truth never errs") {
  Catalog cat({c_a(), c_b(), p0(), s1()});
  cat.certify(cuts());
  ErrorSetReport r = error_set(cat, c_a(), GridSpec::parse("-3:3:1/3").points(), Mode::t2);
  CHECK(r.errors.empty());
}

TEST_CASE("consistency_t2") {
  CHECK(consistency_t2(c_a(), past_view(c_a(), Rat(5)))->is_identity());

  // g(2x+1) jumps at -1/2; the recovered warp must send -1/2 to 0.
  AffineWarp t(Rat(2), Rat(1));
  Scenario f = compose_warp(s1(), t);
  PastView pv = past_view(f, Rat(0));
  auto found = consistency_t2(s1(), pv);
  REQUIRE(found.has_value());
  CHECK((*found)(Rat(-1, 2)) == 0);
  CHECK(restrict_eq(f, compose_warp(s1(), *found), Rat(0)));
  for (const AffineWarp& w : consistent_warps(s1(), pv)) CHECK(restrict_eq(f, compose_warp(s1(), w), Rat(0)));

  CHECK_FALSE(consistency_t2(p0(), past_view(s1(), Rat(1))).has_value());
  CHECK_FALSE(consistency_ht(p0(), past_view(s1(), Rat(1))));
  CHECK(consistency_ht(c_a(), past_view(s1(), Rat(0))));
}

TEST_CASE("closure") {
  Catalog bad({p0(), s1()});
  ClosureReport r = check_closure(bad, {Rat(0)});
  CHECK_FALSE(r.passed());
  bool at_zero = false;
  for (const auto& v : r.violations) at_zero = at_zero || (v.entry == 1 && v.cut == 0);
  CHECK(at_zero);
  CHECK_THROWS_AS(bad.certify({Rat(0)}), ClosureViolation);

  Catalog good({c_a(), c_b(), p0(), s1()});
  CHECK(check_closure(good, cuts()).passed());
}

TEST_CASE("well-definedness fails without closure") {
  Catalog bad({p0(), s1()});
  WellDefinednessReport wd = well_definedness_check(bad, past_view(s1(), Rat(0)), 8);
  CHECK_FALSE(wd.agree());
}

TEST_CASE("equivariance") {
  Catalog cat({c_a(), p0(), s1()});
  cat.certify(cuts());
  auto grid = GridSpec::parse("-5:5:1/10").points();
  CHECK(equivariance_check(cat, s1(), AffineWarp(), grid).violations.empty());
  EquivarianceReport r = equivariance_check(cat, s1(), AffineWarp(Rat(2), Rat(3)), grid);
  CHECK(r.checked == grid.size());
  CHECK(r.violations.empty());

  Catalog ht_cat({c_a(), c_b(), p0(), s1(), compose_warp(s1(), AffineWarp::shift(Rat(1)))});
  EquivarianceReport h =
      equivariance_check(ht_cat, s1(), AffineWarp::shift(Rat(1)), GridSpec::parse("-2:2:1/4").points(), Mode::ht);
  CHECK_FALSE(h.violations.empty());
}

TEST_CASE("soundness and least index on generated catalogs") {
  ExperimentConfig cfg;
  cfg.seed = 11;
  cfg.catalog_size = 16;
  Catalog cat = gen_catalog(cfg);
  Rng rng(5);
  auto grid = GridSpec::parse("-3:3:1/2").points();
  for (int trial = 0; trial < 6; ++trial) {
    const Scenario& base = cat.entry(rng.range(0, static_cast<long>(cat.size()) - 1));
    Scenario f = compose_warp(base, random_warp(rng));
    for (const Rat& x : grid) {
      PastView pv = past_view(f, x);
      Guess g = t2_predict(cat, pv);
      Scenario witness = compose_warp(cat.entry(g.witness_index), g.witness_warp);
      CHECK(restrict_eq(f, witness, x));
      CHECK(eval(witness, x) == g.state);
      for (std::size_t j = 0; j < g.witness_index; ++j) CHECK_FALSE(consistency_t2(cat.entry(j), pv).has_value());
    }
  }
}
