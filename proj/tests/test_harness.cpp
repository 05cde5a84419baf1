#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "anonlab/harness.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

using namespace anonlab;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.seed = 3;
  cfg.catalog_size = 12;
  cfg.error_pairs = 6;
  cfg.equivariance_triples = 4;
  cfg.equivariance_grid = 20;
  cfg.wd_queries = 20;
  cfg.extension_instances = 30;
  cfg.warp_pairs = 50;
  cfg.smooth_pairs = 1;
  cfg.witness_samples = 5;
  cfg.transition_grid = 50;
  cfg.truncation_depth = 8;
  cfg.grid = GridSpec::parse("-2:2:1/4");
  return cfg;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("grid spec") {
  GridSpec g = GridSpec::parse("-5:5:1/100");
  CHECK(g.points().size() == 1000);
  CHECK(g.points().front() == -5);
  CHECK(g.points().back() == Rat(499, 100));
  CHECK(GridSpec::parse("0:1:0.25").points().size() == 4);
  CHECK(GridSpec::parse(g.str()).points() == g.points());
  CHECK_THROWS(GridSpec::parse("0:1"));
  CHECK_THROWS(GridSpec::parse("0:1:0"));
  CHECK_THROWS(GridSpec::parse("1:0:1"));
}

TEST_CASE("config round trip") {
  ExperimentConfig cfg = small_config();
  cfg.suites = {"error_set", "witness"};
  cfg.mutation = "skip_closure";
  nlohmann::json j = to_json(cfg);
  CHECK(to_json(config_from_json(j)) == j);
  CHECK(config_from_json(nlohmann::json::object()).catalog_size == 24);
  j["bogus"] = 1;
  CHECK_THROWS(config_from_json(j));
  nlohmann::json bad = to_json(cfg);
  bad["catalogSize"] = 0;
  CHECK_THROWS(config_from_json(bad));
}

TEST_CASE("precision from the environment") {
  ::unsetenv("ANONLAB_PRECISION");
  CHECK(default_precision_from_env() == kDefaultPrecisionBits);
  ::setenv("ANONLAB_PRECISION", "512", 1);
  CHECK(default_precision_from_env() == 512);
  ::unsetenv("ANONLAB_PRECISION");
}

TEST_CASE("rng is seeded") {
  Rng a(9), b(9);
  for (int i = 0; i < 20; ++i) CHECK(a.next() == b.next());
  Rng c(1);
  for (int i = 0; i < 200; ++i) {
    long v = c.range(-3, 4);
    CHECK(v >= -3);
    CHECK(v <= 4);
    CHECK(random_warp(c).slope() > 0);
  }
}

TEST_CASE("generated catalogs") {
  ExperimentConfig tiny;
  tiny.alphabet_size = 1;
  tiny.catalog_size = 1;
  Catalog one = gen_catalog(tiny);
  REQUIRE(one.size() == 1);
  CHECK(one.entry(0) == Scenario::constant(alphabet(1)[0]));

  for (std::uint64_t seed : {1u, 2u, 3u}) {
    ExperimentConfig cfg;
    cfg.seed = seed;
    Catalog cat = gen_catalog(cfg);
    CHECK(cat.size() >= cfg.catalog_size);
    CHECK(cat.closure_certified());
    for (std::size_t i = 1; i < cat.size(); ++i) CHECK(cat.tier(i - 1) <= cat.tier(i));
    std::vector<Rat> cuts;
    for (long k = -6; k <= 6; ++k) cuts.push_back(Rat(k, 3));
    CHECK(check_closure(cat, cuts).passed());
    CHECK(gen_catalog(cfg).entries() == cat.entries());
  }
}

TEST_CASE("campaigns are deterministic") {
  ExperimentConfig cfg = small_config();
  cfg.suites = {"error_set", "equivariance", "well_definedness", "warp_algebra", "transition_values"};
  CampaignReport a = run_campaign(cfg);
  CampaignReport b = run_campaign(cfg);
  CHECK(a.passed());
  CHECK(a.to_json().dump() == b.to_json().dump());
  CHECK(a.to_json().dump().find("seconds") == std::string::npos);
  cfg.include_timing = true;
  CHECK(run_campaign(cfg).to_json().dump().find("seconds") != std::string::npos);
  REQUIRE(a.find("error_set") != nullptr);
  CHECK(a.find("error_set")->checks > 0);
  CHECK(a.find("nonexistent") == nullptr);
}

TEST_CASE("negative controls") {
  ExperimentConfig cfg = small_config();
  cfg.suites = {"equivariance_ht_control", "well_definedness_control"};
  CampaignReport r = run_campaign(cfg);
  for (const auto& s : r.suites) {
    CHECK(s.negative_control);
    CHECK(s.observed_violations > 0);
    CHECK(s.passed());
  }
}

TEST_CASE("skipping closure breaks well-definedness") {
  ExperimentConfig cfg;
  cfg.seed = 1;
  cfg.suites = {"well_definedness"};
  cfg.mutation = "skip_closure";
  CampaignReport r = run_campaign(cfg);
  REQUIRE(r.find("well_definedness") != nullptr);
  CHECK(r.find("well_definedness")->failures > 0);
  CHECK_FALSE(r.passed());
}

TEST_CASE("plot data") {
  PrecisionScope scope(128);
  auto dir = std::filesystem::temp_directory_path() / "anonlab_test_harness";
  std::filesystem::create_directories(dir);
  std::string path = (dir / "s.csv").string();
  write_s_samples(path, 10);
  auto lines = read_lines(path);
  REQUIRE(lines.size() == 12);
  CHECK(lines[0] == "x,s");
  auto field = [](const std::string& l, int i) {
    auto comma = l.find(',');
    return std::stod(i == 0 ? l.substr(0, comma) : l.substr(comma + 1));
  };
  CHECK(field(lines[1], 0) == 0);
  CHECK(field(lines[1], 1) == 0);
  CHECK(field(lines[11], 0) == 1);
  CHECK(field(lines[11], 1) == 1);
  CHECK(field(lines[6], 1) == doctest::Approx(0.5));

  SmoothWarpSpec spec = build_warp(Rat(0), Rat(0), 8);
  std::string wpath = (dir / "t.csv").string();
  write_warp_samples(wpath, spec, Rat(-2), Rat(2), 40);
  auto wl = read_lines(wpath);
  CHECK(wl[0] == "x,t");
  CHECK(wl.size() > 30);
  std::filesystem::remove_all(dir);
}
