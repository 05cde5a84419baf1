// Runs the default seeded campaign and prints one PASS/FAIL line per criterion.
// Exit status is nonzero if any criterion fails.

#include "anonlab/harness.hpp"

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

using namespace anonlab;

namespace {

int failed = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
  if (!ok) ++failed;
}

const SuiteResult& need(const CampaignReport& rep, const std::string& name) {
  const SuiteResult* s = rep.find(name);
  if (!s) throw std::runtime_error("suite missing from report: " + name);
  return *s;
}

std::string counts(const SuiteResult& s) {
  std::ostringstream os;
  os << s.checks << " checks, " << s.failures << " failures";
  if (s.negative_control) os << ", " << s.observed_violations << " violations observed";
  if (!s.counterexamples.empty()) os << ", first counterexample " << s.counterexamples.front().dump();
  return os.str();
}

bool clean(const SuiteResult& s, std::size_t min_checks) { return s.failures == 0 && s.checks >= min_checks; }

}  // namespace

int main() {
  ExperimentConfig cfg;  // seed 1, 256 bits, N = 20, k <= 4, grid -5:5:1/100
  std::cout << "config " << to_json(cfg).dump() << std::endl;

  auto t0 = std::chrono::steady_clock::now();
  CampaignReport rep = run_campaign(cfg);
  double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  {
    const SuiteResult& s = need(rep, "error_set");
    const auto grid = s.details.at("gridPoints").get<std::size_t>();
    const auto largest = s.details.at("maxCatalogSize").get<std::size_t>();
    // Two checks per pair: ht and t2.
    bool ok = clean(s, 2 * 200) && cfg.error_pairs >= 200 && grid >= 1000 && largest <= 50 && s.seconds < 60;
    std::ostringstream d;
    d << counts(s) << "; pairs " << cfg.error_pairs << ", grid " << grid << " points, largest catalog " << largest
      << ", max errors " << s.details.at("maxErrors") << ", " << s.seconds << " s";
    report("error-set bound", ok, d.str());
  }
  {
    const SuiteResult& s = need(rep, "equivariance");
    const SuiteResult& c = need(rep, "equivariance_ht_control");
    bool ok = clean(s, 100) && cfg.equivariance_grid >= 100 && c.observed_violations >= 1;
    report("t2 equivariance", ok, counts(s) + "; ht control: " + counts(c));
  }
  {
    const SuiteResult& s = need(rep, "well_definedness");
    const SuiteResult& c = need(rep, "well_definedness_control");
    const auto full = s.details.at("queriesAtMinWarps").get<std::size_t>();
    const auto min_warps = s.details.at("minWarps").get<std::size_t>();
    bool ok = s.failures == 0 && min_warps >= 5 && full >= cfg.wd_queries && c.observed_violations >= 1;
    std::ostringstream d;
    d << counts(s) << "; " << full << "/" << cfg.wd_queries << " queries with >= " << min_warps
      << " warps, histogram " << s.details.at("warpsPerQuery").dump() << "; control: " << counts(c);
    report("well-definedness", ok, d.str());
  }
  {
    const SuiteResult& p = need(rep, "periodic_extension");
    const SuiteResult& a = need(rep, "affine_extension");
    const SuiteResult& m = need(rep, "period_match");
    bool ok = clean(p, 500) && clean(a, 500) && clean(m, 500);
    report("extensions", ok, "periodic " + counts(p) + "; affine " + counts(a) + "; period match " + counts(m));
  }
  {
    const SuiteResult& s = need(rep, "warp_algebra");
    report("warp algebra", clean(s, 2 * 1000), counts(s));
  }
  {
    const SuiteResult& s = need(rep, "smooth_construction");
    bool ok = clean(s, 20) && cfg.truncation_depth == 20 && cfg.precision_bits >= 256 && cfg.kmax >= 4 &&
              s.seconds < 300;
    std::ostringstream d;
    d << counts(s) << "; N " << cfg.truncation_depth << ", " << cfg.precision_bits << " bits, k <= " << cfg.kmax
      << ", " << s.seconds << " s";
    report("smooth construction", ok, d.str());
  }
  {
    const SuiteResult& s = need(rep, "witness");
    report("witness verification", clean(s, 20 * 100), counts(s));
  }
  {
    const SuiteResult& s = need(rep, "transition_values");
    // 3 point values, 1000 symmetry points, 12 endpoint derivatives.
    report("transition values", clean(s, 3 + 1000 + 12),
           counts(s) + "; max deviation " + s.details.at("symmetryMaxDeviation").get<std::string>());
  }
  {
    const std::string first = rep.to_json().dump();
    const std::string second = run_campaign(cfg).to_json().dump();
    report("determinism", first == second,
           std::to_string(first.size()) + " bytes, " + (first == second ? "identical" : "different") + " on rerun");
  }

  std::cout << "campaign " << (rep.passed() ? "passed" : "failed") << " in " << total << " s" << std::endl;
  return failed == 0 ? 0 : 1;
}
