#include "anonlab/harness.hpp"

#include "anonlab/fpath.hpp"
#include "anonlab/scenario_json.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <ios>
#include <map>
#include <set>
#include <thread>

namespace anonlab {

using nlohmann::json;

// ---- grid ----

std::vector<Rat> GridSpec::points() const {
  if (step <= 0) throw std::invalid_argument("grid step must be positive");
  std::vector<Rat> out;
  for (Rat x = start; x < stop; x += step) out.push_back(x);
  if (out.empty()) throw std::invalid_argument("grid " + str() + " is empty");
  return out;
}

GridSpec GridSpec::parse(const std::string& text) {
  auto a = text.find(':');
  auto b = a == std::string::npos ? a : text.find(':', a + 1);
  if (b == std::string::npos || text.find(':', b + 1) != std::string::npos) {
    throw ParseError("grid must look like start:stop:step, got '" + text + "'");
  }
  GridSpec g{parse_rat(text.substr(0, a)), parse_rat(text.substr(a + 1, b - a - 1)), parse_rat(text.substr(b + 1))};
  g.points();
  return g;
}

std::string GridSpec::str() const { return format_rat(start) + ":" + format_rat(stop) + ":" + format_rat(step); }

// ---- config ----

namespace {

const std::vector<std::string> kSuites = {
    "error_set",          "equivariance",     "equivariance_ht_control", "well_definedness",
    "well_definedness_control", "periodic_extension", "affine_extension", "period_match",
    "warp_algebra",       "smooth_construction", "witness",              "transition_values",
};

template <class T>
void read_positive(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  auto v = j.at(key).get<long long>();
  if (v <= 0) throw std::invalid_argument(std::string(key) + " must be positive");
  out = static_cast<T>(v);
}

}  // namespace

json to_json(const ExperimentConfig& c) {
  return json{{"seed", c.seed},
              {"alphabetSize", c.alphabet_size},
              {"catalogSize", c.catalog_size},
              {"grid", {{"start", format_rat(c.grid.start)}, {"stop", format_rat(c.grid.stop)}, {"step", format_rat(c.grid.step)}}},
              {"mode", to_string(c.mode)},
              {"precisionBits", c.precision_bits},
              {"truncationDepth", c.truncation_depth},
              {"kmax", c.kmax},
              {"errorPairs", c.error_pairs},
              {"equivarianceTriples", c.equivariance_triples},
              {"equivarianceGrid", c.equivariance_grid},
              {"wdQueries", c.wd_queries},
              {"wdWarps", c.wd_warps},
              {"extensionInstances", c.extension_instances},
              {"warpPairs", c.warp_pairs},
              {"smoothPairs", c.smooth_pairs},
              {"witnessSamples", c.witness_samples},
              {"transitionGrid", c.transition_grid},
              {"suites", c.suites},
              {"mutation", c.mutation},
              {"includeTiming", c.include_timing}};
}

ExperimentConfig config_from_json(const json& j) {
  static const std::set<std::string> known = {
      "seed", "alphabetSize", "catalogSize", "grid", "mode", "precisionBits", "truncationDepth", "kmax",
      "errorPairs", "equivarianceTriples", "equivarianceGrid", "wdQueries", "wdWarps", "extensionInstances",
      "warpPairs", "smoothPairs", "witnessSamples", "transitionGrid", "suites", "mutation", "includeTiming"};
  if (!j.is_object()) throw ParseError("config must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) throw ParseError("unknown config key '" + k + "'");
  }
  ExperimentConfig c;
  c.precision_bits = default_precision_from_env();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  read_positive(j, "alphabetSize", c.alphabet_size);
  read_positive(j, "catalogSize", c.catalog_size);
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    if (g.is_string()) {
      c.grid = GridSpec::parse(g.get<std::string>());
    } else {
      c.grid = GridSpec{parse_rat(g.at("start").get<std::string>()), parse_rat(g.at("stop").get<std::string>()),
                        parse_rat(g.at("step").get<std::string>())};
      c.grid.points();
    }
  }
  if (j.contains("mode")) c.mode = parse_mode(j.at("mode").get<std::string>());
  read_positive(j, "precisionBits", c.precision_bits);
  read_positive(j, "truncationDepth", c.truncation_depth);
  read_positive(j, "kmax", c.kmax);
  read_positive(j, "errorPairs", c.error_pairs);
  read_positive(j, "equivarianceTriples", c.equivariance_triples);
  read_positive(j, "equivarianceGrid", c.equivariance_grid);
  read_positive(j, "wdQueries", c.wd_queries);
  read_positive(j, "wdWarps", c.wd_warps);
  read_positive(j, "extensionInstances", c.extension_instances);
  read_positive(j, "warpPairs", c.warp_pairs);
  read_positive(j, "smoothPairs", c.smooth_pairs);
  read_positive(j, "witnessSamples", c.witness_samples);
  read_positive(j, "transitionGrid", c.transition_grid);
  if (j.contains("suites")) {
    c.suites = j.at("suites").get<std::vector<std::string>>();
    for (const auto& s : c.suites) {
      if (std::find(kSuites.begin(), kSuites.end(), s) == kSuites.end()) throw ParseError("unknown suite '" + s + "'");
    }
  }
  if (j.contains("mutation")) c.mutation = j.at("mutation").get<std::string>();
  if (c.mutation != "none" && c.mutation != "skip_closure") throw ParseError("unknown mutation '" + c.mutation + "'");
  if (j.contains("includeTiming")) c.include_timing = j.at("includeTiming").get<bool>();
  if (c.truncation_depth < 2) throw std::invalid_argument("truncationDepth must be at least 2");
  return c;
}

unsigned default_precision_from_env() {
  const char* v = std::getenv("ANONLAB_PRECISION");
  if (!v || !*v) return kDefaultPrecisionBits;
  char* end = nullptr;
  unsigned long bits = std::strtoul(v, &end, 10);
  if (*end != '\0' || bits < 64 || bits > 1u << 20) {
    throw std::invalid_argument(std::string("ANONLAB_PRECISION must be a bit count >= 64, got '") + v + "'");
  }
  return static_cast<unsigned>(bits);
}

std::vector<std::string> all_suites() { return kSuites; }

// ---- generators ----

Rat Rng::rat(long lo, long hi, long max_den) {
  long d = range(1, max_den);
  return Rat(range(lo * d, hi * d), d);
}

std::vector<State> alphabet(unsigned size) {
  std::vector<State> out;
  for (unsigned i = 0; i < size; ++i) {
    out.push_back(State{i < 26 ? std::string(1, static_cast<char>('A' + i)) : "S" + std::to_string(i)});
  }
  return out;
}

namespace {

State other_than(Rng& rng, const std::vector<State>& states, const State& avoid) {
  std::size_t i = rng.next() % (states.size() - 1);
  const State& s = states[i];
  return s == avoid ? states.back() : s;
}

std::vector<State> chain_values(Rng& rng, const std::vector<State>& states, std::size_t n) {
  std::vector<State> v{rng.pick(states)};
  while (v.size() < n) v.push_back(other_than(rng, states, v.back()));
  return v;
}

// Distinct sorted fractions r in [0, 1) from a small fixed menu.
std::vector<Rat> menu_fractions(Rng& rng, std::size_t n) {
  static const std::vector<Rat> menu = {Rat(0), Rat(1, 4), Rat(1, 3), Rat(1, 2), Rat(2, 3), Rat(3, 4)};
  std::set<Rat> s;
  while (s.size() < n) s.insert(rng.pick(menu));
  return {s.begin(), s.end()};
}

}  // namespace

Scenario random_step(Rng& rng, const std::vector<State>& states, unsigned min_jumps, unsigned max_jumps) {
  if (states.size() < 2) return Scenario::constant(states.front());
  auto k = static_cast<std::size_t>(rng.range(min_jumps, max_jumps));
  std::set<Rat> bps;
  while (bps.size() < k) bps.insert(rng.rat(-4, 4, 4));
  return Scenario::step({bps.begin(), bps.end()}, chain_values(rng, states, k + 1));
}

Scenario random_periodic(Rng& rng, const std::vector<State>& states) {
  static const std::vector<Rat> periods = {Rat(1), Rat(1, 2), Rat(3, 2), Rat(2), Rat(3)};
  if (states.size() < 2) return Scenario::constant(states.front());
  Rat period = rng.pick(periods);
  std::size_t m = states.size() >= 3 ? static_cast<std::size_t>(rng.range(2, 3)) : 2;
  std::vector<Rat> starts;
  for (const Rat& r : menu_fractions(rng, m)) starts.push_back(period * r);
  return Scenario::periodic(period, std::move(starts), chain_values(rng, states, m));
}

Scenario random_log_periodic(Rng& rng, const std::vector<State>& states) {
  static const std::vector<Rat> ratios = {Rat(2), Rat(3), Rat(3, 2)};
  if (states.size() < 2) return Scenario::constant(states.front());
  Rat p = rng.rat(-3, 3, 2);
  Rat a = rng.pick(ratios);
  auto side = [&](bool plus, std::size_t m) {
    if (m == 1) return Pattern::constant(rng.pick(states));
    Pattern pat;
    for (const Rat& r : menu_fractions(rng, m)) pat.starts.push_back(plus ? 1 + (a - 1) * r : -a + (a - 1) * r);
    pat.values = chain_values(rng, states, m);
    return pat;
  };
  std::size_t mm = static_cast<std::size_t>(rng.range(1, 2));
  std::size_t mp = mm == 1 ? 2 : static_cast<std::size_t>(rng.range(1, 2));
  Pattern minus = side(false, mm);
  Pattern plus = side(true, mp);
  return Scenario::log_periodic(p, a, std::move(minus), rng.pick(states), std::move(plus));
}

AffineWarp random_warp(Rng& rng) {
  static const std::vector<Rat> slopes = {Rat(1, 3), Rat(1, 2), Rat(2, 3), Rat(1), Rat(3, 2), Rat(2), Rat(3)};
  return AffineWarp(rng.pick(slopes), rng.rat(-3, 3, 4));
}

Catalog gen_catalog(const ExperimentConfig& cfg, Rng& rng) {
  const auto states = alphabet(cfg.alphabet_size);
  const bool closed = cfg.mutation != "skip_closure";
  std::vector<Scenario> entries;
  auto add = [&](Scenario f) {
    if (std::find(entries.begin(), entries.end(), f) == entries.end()) entries.push_back(std::move(f));
  };
  if (closed) {
    for (const auto& s : states) add(Scenario::constant(s));
  }
  const std::size_t target = cfg.catalog_size;
  for (unsigned attempt = 0; entries.size() < target && attempt < 20 * target; ++attempt) {
    switch (rng.range(0, 3)) {
      case 0:
        add(random_periodic(rng, states));
        break;
      case 1:
        add(random_log_periodic(rng, states));
        break;
      case 2:
        add(random_step(rng, states, 1, 1));
        break;
      default: {
        Scenario f = random_step(rng, states, 2, 4);
        if (!closed) {
          add(std::move(f));
          break;
        }
        if (entries.size() + 2 > target) break;
        const auto& v = f.as_step()->values;
        add(Scenario::step({Rat(0)}, {v[0], v[1]}));
        add(std::move(f));
        break;
      }
    }
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Scenario& a, const Scenario& b) { return tier_of(a) < tier_of(b); });
  Catalog cat(std::move(entries));
  if (closed) cat.certify({});
  return cat;
}

Catalog gen_catalog(const ExperimentConfig& cfg) {
  Rng rng(cfg.seed);
  return gen_catalog(cfg, rng);
}

// ---- campaign ----

bool SuiteResult::passed() const { return negative_control ? observed_violations > 0 && failures == 0 : failures == 0; }

bool CampaignReport::passed() const {
  return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed(); });
}

const SuiteResult* CampaignReport::find(const std::string& name) const {
  for (const auto& s : suites) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

json CampaignReport::to_json() const {
  json j;
  j["config"] = anonlab::to_json(config);
  j["suites"] = json::array();
  for (const auto& s : suites) {
    json e{{"name", s.name},
           {"negativeControl", s.negative_control},
           {"checks", s.checks},
           {"failures", s.failures},
           {"observedViolations", s.observed_violations},
           {"passed", s.passed()},
           {"counterexamples", s.counterexamples},
           {"details", s.details}};
    if (config.include_timing) e["seconds"] = s.seconds;
    j["suites"].push_back(std::move(e));
  }
  j["passed"] = passed();
  return j;
}

namespace {

constexpr std::size_t kMaxCounterexamples = 5;

SuiteResult named(std::string name) {
  SuiteResult r;
  r.name = std::move(name);
  return r;
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t name_hash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
  return h;
}

Rng task_rng(const ExperimentConfig& cfg, const std::string& suite, std::size_t i) {
  return Rng(mix(cfg.seed ^ mix(name_hash(suite) + i)));
}

json catalog_json(const Catalog& cat) {
  json a = json::array();
  for (const auto& e : cat.entries()) a.push_back(to_json(e));
  return a;
}

// Outcome of one task: ok, or a counterexample payload.
struct Outcome {
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::vector<json> counterexamples;
  json stat;  // per-task numbers folded into details
};

template <class Fn>
std::vector<Outcome> run_tasks(std::size_t n, unsigned precision_bits, Fn fn) {
  std::vector<Outcome> out(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    PrecisionScope scope(precision_bits);
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = fn(i);
      } catch (const std::exception& e) {
        out[i].checks += 1;
        out[i].failures += 1;
        out[i].counterexamples.push_back(json{{"task", i}, {"exception", e.what()}});
      }
    }
  };
  unsigned threads = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), static_cast<unsigned>(n)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

void fold(SuiteResult& r, std::vector<Outcome> outs) {
  for (auto& o : outs) {
    r.checks += o.checks;
    r.failures += o.failures;
    for (auto& c : o.counterexamples) {
      if (r.counterexamples.size() < kMaxCounterexamples) r.counterexamples.push_back(std::move(c));
    }
  }
}

Scenario t2_truth(Rng& rng, const Catalog& cat, AffineWarp* tau = nullptr) {
  const Scenario& e = cat.entry(rng.next() % cat.size());
  AffineWarp t = random_warp(rng);
  if (tau) *tau = t;
  return compose_warp(e, t);
}

SuiteResult suite_error_set(const ExperimentConfig& cfg) {
  SuiteResult r = named("error_set");
  const auto grid = cfg.grid.points();
  auto outs = run_tasks(cfg.error_pairs, cfg.precision_bits, [&](std::size_t i) {
    Rng rng = task_rng(cfg, "error_set", i);
    Catalog cat = gen_catalog(cfg, rng);
    Outcome o;
    std::size_t idx = rng.next() % cat.size();
    AffineWarp tau = random_warp(rng);
    std::size_t max_err = 0;
    for (Mode m : {Mode::ht, Mode::t2}) {
      Scenario f = m == Mode::ht ? cat.entry(idx) : compose_warp(cat.entry(idx), tau);
      ++o.checks;
      auto rep = error_set(cat, f, grid, m);
      auto problems = error_set_violations(rep, cat.size());
      max_err = std::max(max_err, rep.errors.size());
      if (!problems.empty()) {
        ++o.failures;
        o.counterexamples.push_back(json{{"task", i}, {"mode", to_string(m)}, {"catalog", catalog_json(cat)},
                                         {"truth", to_json(f)}, {"problems", problems}});
      }
    }
    o.stat = json{{"errors", max_err}, {"catalog", cat.size()}};
    return o;
  });
  std::size_t worst = 0, largest = 0;
  for (const auto& o : outs) {
    if (!o.stat.is_object()) continue;
    worst = std::max(worst, o.stat.at("errors").get<std::size_t>());
    largest = std::max(largest, o.stat.at("catalog").get<std::size_t>());
  }
  r.details = json{{"gridPoints", grid.size()}, {"maxErrors", worst}, {"maxCatalogSize", largest}};
  fold(r, std::move(outs));
  return r;
}

std::vector<Rat> agent_sample(Rng& rng, std::size_t n) {
  std::set<Rat> s;
  while (s.size() < n) s.insert(rng.rat(-5, 5, 8));
  return {s.begin(), s.end()};
}

SuiteResult suite_equivariance(const ExperimentConfig& cfg) {
  SuiteResult r = named("equivariance");
  fold(r, run_tasks(cfg.equivariance_triples, cfg.precision_bits, [&](std::size_t i) {
         Rng rng = task_rng(cfg, "equivariance", i);
         Catalog cat = gen_catalog(cfg, rng);
         Scenario f = t2_truth(rng, cat);
         AffineWarp t = random_warp(rng);
         auto grid = agent_sample(rng, cfg.equivariance_grid);
         Outcome o;
         o.checks = 1;
         auto rep = equivariance_check(cat, f, t, grid, Mode::t2);
         if (!rep.violations.empty()) {
           o.failures = 1;
           const auto& v = rep.violations.front();
           o.counterexamples.push_back(json{{"task", i}, {"catalog", catalog_json(cat)}, {"truth", to_json(f)},
                                            {"warp", to_json(t)}, {"agent", format_rat(v.agent)},
                                            {"warped", v.warped.id}, {"direct", v.direct.id},
                                            {"violations", rep.violations.size()}});
         }
         return o;
       }));
  return r;
}

const State kA{"A"}, kB{"B"};

Scenario alternation() { return Scenario::periodic(Rat(1), {Rat(0), Rat(1, 2)}, {kA, kB}); }
Scenario jump_at_zero() { return Scenario::step({Rat(0)}, {kA, kB}); }

SuiteResult suite_equivariance_control(const ExperimentConfig&) {
  SuiteResult r = named("equivariance_ht_control");
  r.negative_control = true;
  Scenario s1 = jump_at_zero();
  Catalog cat({Scenario::constant(kA), Scenario::constant(kB), alternation(), s1,
               compose_warp(s1, AffineWarp::shift(Rat(1)))});
  GridSpec g{Rat(-2), Rat(2), Rat(1, 4)};
  auto rep = equivariance_check(cat, s1, AffineWarp::shift(Rat(1)), g.points(), Mode::ht);
  r.checks = 1;
  r.observed_violations = rep.violations.size();
  json agents = json::array();
  for (const auto& v : rep.violations) agents.push_back(format_rat(v.agent));
  r.details = json{{"violatingAgents", agents}};
  return r;
}

SuiteResult suite_well_definedness(const ExperimentConfig& cfg) {
  SuiteResult r = named("well_definedness");
  const std::size_t wanted = std::min<std::size_t>(5, cfg.wd_warps);
  auto outs = run_tasks(cfg.wd_queries, cfg.precision_bits, [&](std::size_t i) {
    Rng rng = task_rng(cfg, "well_definedness", i);
    Outcome o;
    std::size_t pinned = 0;
    // Pasts with two visible jumps admit a single warp; those are checked
    // too but the query is redrawn until it has a real choice of warp.
    for (int attempt = 0; attempt < 16; ++attempt) {
      Catalog cat = gen_catalog(cfg, rng);
      Scenario f = t2_truth(rng, cat);
      Rat cut = rng.rat(-5, 5, 8);
      if (auto st = f.as_step(); st && !st->breakpoints.empty() && rng.coin()) {
        // Cuts on and next to the jumps, where the choice of warp matters most.
        static const std::vector<Rat> nudges = {Rat(0), Rat(-1, 8), Rat(1, 8), Rat(-1), Rat(1)};
        cut = rng.pick(st->breakpoints) + rng.pick(nudges);
      }
      auto rep = well_definedness_check(cat, PastView(f, cut), cfg.wd_warps);
      ++o.checks;
      if (!rep.agree()) {
        ++o.failures;
        json warps = json::array(), guesses = json::array();
        for (std::size_t k = 0; k < rep.warps.size(); ++k) {
          warps.push_back(to_json(rep.warps[k]));
          guesses.push_back(rep.guesses[k].id);
        }
        o.counterexamples.push_back(json{{"task", i}, {"catalog", catalog_json(cat)}, {"truth", to_json(f)},
                                         {"cut", format_rat(cut)}, {"index", rep.index}, {"warps", warps},
                                         {"guesses", guesses}});
      }
      o.stat = json{{"warps", rep.warps.size()}, {"pinned", pinned}};
      if (rep.warps.size() >= wanted) break;
      ++pinned;
    }
    return o;
  });
  std::map<std::size_t, std::size_t> hist;
  std::size_t pinned = 0, full = 0;
  for (const auto& o : outs) {
    if (!o.stat.is_object()) continue;
    const std::size_t n = o.stat.at("warps").get<std::size_t>();
    ++hist[n];
    if (n >= wanted) ++full;
    pinned += o.stat.at("pinned").get<std::size_t>();
  }
  json h = json::object();
  for (const auto& [k, v] : hist) h[std::to_string(k)] = v;
  r.details = json{{"warpsPerQuery", h},     {"requested", cfg.wd_warps}, {"minWarps", wanted},
                   {"queriesAtMinWarps", full}, {"pinnedRedrawn", pinned}};
  fold(r, std::move(outs));
  return r;
}

SuiteResult suite_well_definedness_control(const ExperimentConfig& cfg) {
  SuiteResult r = named("well_definedness_control");
  r.negative_control = true;
  Catalog cat({alternation(), jump_at_zero()});
  auto rep = well_definedness_check(cat, PastView(jump_at_zero(), Rat(0)), std::max(5u, cfg.wd_warps));
  r.checks = 1;
  r.observed_violations = rep.agree() ? 0 : 1;
  json g = json::array();
  for (std::size_t k = 0; k < rep.warps.size(); ++k) g.push_back(json{{"warp", to_json(rep.warps[k])}, {"guess", rep.guesses[k].id}});
  r.details = json{{"index", rep.index}, {"samples", g}};
  return r;
}

SuiteResult suite_periodic_extension(const ExperimentConfig& cfg) {
  SuiteResult r = named("periodic_extension");
  const auto states = alphabet(std::max(2u, cfg.alphabet_size));
  fold(r, run_tasks(cfg.extension_instances, cfg.precision_bits, [&](std::size_t i) {
         Rng rng = task_rng(cfg, "periodic_extension", i);
         Scenario f = Scenario::constant(states.front());
         Rat x, b;
         if (rng.coin()) {
           f = random_periodic(rng, states);
           Rat base = f.as_periodic() ? f.as_periodic()->period : Rat(1);
           long k = rng.range(1, 3) * (rng.coin() ? 1 : -1);
           b = base * k;
           x = rng.rat(-5, 5, 4);
         } else {
           f = random_step(rng, states, 1, 3);
           b = rng.rat(1, 3, 4) * (rng.coin() ? 1 : -1);
           // y < x and y + b must both stay left of the first jump.
           x = f.as_step()->breakpoints.front() - rng.rat(0, 2, 4) - std::max(b, Rat(0));
         }
         Outcome o;
         o.checks = 1;
         Scenario g = periodic_extension(f, x, b);
         if (!periods_of(g).contains(b) || !restrict_eq(g, f, x) || !(compose_warp(g, AffineWarp::shift(b)) == g)) {
           o.failures = 1;
           o.counterexamples.push_back(json{{"task", i}, {"f", to_json(f)}, {"x", format_rat(x)}, {"b", format_rat(b)},
                                            {"g", to_json(g)}});
         }
         return o;
       }));
  return r;
}

SuiteResult suite_affine_extension(const ExperimentConfig& cfg) {
  SuiteResult r = named("affine_extension");
  const auto states = alphabet(std::max(2u, cfg.alphabet_size));
  static const std::vector<Rat> scales = {Rat(1, 3), Rat(1, 2), Rat(2, 3), Rat(3, 2), Rat(2), Rat(3)};
  fold(r, run_tasks(cfg.extension_instances, cfg.precision_bits, [&](std::size_t i) {
         Rng rng = task_rng(cfg, "affine_extension", i);
         Scenario f = Scenario::constant(states.front());
         AffineWarp t;
         Rat x = rng.rat(-5, 5, 4);
         switch (rng.range(0, 4)) {
           case 0: {
             f = random_log_periodic(rng, states);
             if (auto lg = f.as_log()) {
               long k = rng.range(1, 2) * (rng.coin() ? 1 : -1);
               t = AffineWarp::scale_about(pow_int(lg->ratio, k), lg->fixed_point);
             } else {
               t = AffineWarp::scale_about(Rat(2), f.as_step()->breakpoints.front());
             }
             break;
           }
           case 1:
             f = random_step(rng, states, 1, 1);
             t = AffineWarp::scale_about(rng.pick(scales), f.as_step()->breakpoints.front());
             break;
           case 2: {
             f = random_step(rng, states, 2, 3);
             const auto& bp = f.as_step()->breakpoints;
             t = AffineWarp::scale_about(rng.pick(scales), bp[0]);
             // The scaled past has to stay left of the second jump.
             x = bp[0] + (bp[1] - bp[0]) * rng.rat(1, 4, 4) / 4 / std::max(t.slope(), Rat(1));
             break;
           }
           case 3: {
             f = random_step(rng, states, 1, 3);
             do {
               t = random_warp(rng);
             } while (t.is_identity());
             const Rat& b0 = f.as_step()->breakpoints.front();
             x = std::min(b0, invert(t)(b0)) - rng.rat(0, 2, 4);
             break;
           }
           default: {
             f = random_periodic(rng, states);
             Rat base = f.as_periodic() ? f.as_periodic()->period : Rat(1);
             t = AffineWarp::shift(base * rng.range(1, 3) * (rng.coin() ? 1 : -1));
             break;
           }
         }
         Outcome o;
         o.checks = 1;
         Scenario g = affine_extension(f, x, t);
         if (!(compose_warp(g, t) == g) || !restrict_eq(g, f, x)) {
           o.failures = 1;
           o.counterexamples.push_back(json{{"task", i}, {"f", to_json(f)}, {"x", format_rat(x)}, {"t", to_json(t)},
                                            {"g", to_json(g)}});
         }
         return o;
       }));
  return r;
}

SuiteResult suite_period_match(const ExperimentConfig& cfg) {
  SuiteResult r = named("period_match");
  const auto states = alphabet(std::max(2u, cfg.alphabet_size));
  fold(r, run_tasks(cfg.extension_instances, cfg.precision_bits, [&](std::size_t i) {
         Rng rng = task_rng(cfg, "period_match", i);
         Scenario f = random_periodic(rng, states);
         Rat base = f.as_periodic()->period;
         Rat b = base * rng.range(1, 4) * (rng.coin() ? 1 : -1);
         Rat x = rng.rat(-5, 5, 4);
         Outcome o;
         o.checks = 1;
         if (!check_period_match(f, x, b)) {
           o.failures = 1;
           o.counterexamples.push_back(json{{"task", i}, {"f", to_json(f)}, {"x", format_rat(x)}, {"b", format_rat(b)}});
         }
         return o;
       }));
  return r;
}

SuiteResult suite_warp_algebra(const ExperimentConfig& cfg) {
  SuiteResult r = named("warp_algebra");
  fold(r, run_tasks(cfg.warp_pairs, cfg.precision_bits, [&](std::size_t i) {
         Rng rng = task_rng(cfg, "warp_algebra", i);
         auto any_warp = [&] {
           return AffineWarp(rng.rat(1, 5, 6), rng.rat(-5, 5, 6));
         };
         AffineWarp s = any_warp(), tbar = any_warp();
         Rat b = rng.rat(-5, 5, 6);
         Outcome o;
         o.checks = 2;
         // Slopes multiply, offsets follow a(cx + d) + c'; recompute by hand.
         auto mul = [](const AffineWarp& u, const AffineWarp& v) {
           return AffineWarp(u.slope() * v.slope(), u.slope() * v.offset() + u.offset());
         };
         auto inv = [](const AffineWarp& u) { return AffineWarp(1 / u.slope(), -u.offset() / u.slope()); };
         ShiftWarp c = commutator(s, tbar);
         AffineWarp expect = mul(inv(s), mul(tbar, mul(s, inv(tbar))));
         if (expect.slope() != 1 || expect.offset() != c.b) {
           ++o.failures;
           o.counterexamples.push_back(json{{"task", i}, {"s", to_json(s)}, {"tbar", to_json(tbar)}, {"commutator", format_rat(c.b)}});
         }
         ShiftWarp cs = conjugate_shift(tbar, b);
         AffineWarp direct = mul(inv(tbar), mul(AffineWarp::shift(b), tbar));
         if (cs.b != b / tbar.slope() || direct.slope() != 1 || direct.offset() != cs.b) {
           ++o.failures;
           o.counterexamples.push_back(json{{"task", i}, {"tbar", to_json(tbar)}, {"b", format_rat(b)}, {"conjugate", format_rat(cs.b)}});
         }
         return o;
       }));
  return r;
}

BigFloat tolerance(unsigned bits) { return pow2(-static_cast<long>(bits) + 56); }

std::pair<Rat, Rat> smooth_pair(const ExperimentConfig& cfg, std::size_t i) {
  Rng rng = task_rng(cfg, "smooth_pair", i);
  return {rng.rat(-3, 3, 8), rng.rat(-3, 3, 8)};
}

SuiteResult suite_smooth(const ExperimentConfig& cfg) {
  SuiteResult r = named("smooth_construction");
  fold(r, run_tasks(cfg.smooth_pairs, cfg.precision_bits, [&](std::size_t i) {
         auto [w, z] = smooth_pair(cfg, i);
         SmoothWarpSpec spec = build_warp(w, z, cfg.truncation_depth);
         Outcome o;
         o.checks = 1;
         FlatnessReport rep = verify_flatness(spec, cfg.kmax);
         BigFloat at_w = warp_eval(spec, to_big(w));
         bool hits_z = abs(BigFloat(at_w - to_big(z))) <= tolerance(cfg.precision_bits);
         if (!rep.passed() || !hits_z) {
           o.failures = 1;
           json v = json::array();
           for (const auto& x : rep.violations) v.push_back(json{{"piece", x.index}, {"k", x.k}, {"what", x.what}});
           o.counterexamples.push_back(json{{"task", i}, {"w", format_rat(w)}, {"z", format_rat(z)},
                                            {"pqFailures", rep.pq_failures}, {"leftTrendOk", rep.left_trend_ok},
                                            {"monotone", rep.monotone}, {"warpAtW", to_decimal(at_w)}, {"violations", v}});
         }
         return o;
       }));
  return r;
}

SuiteResult suite_witness(const ExperimentConfig& cfg) {
  SuiteResult r = named("witness");
  fold(r, run_tasks(cfg.smooth_pairs, cfg.precision_bits, [&](std::size_t i) {
         auto [w, z] = smooth_pair(cfg, i);
         SmoothWarpSpec spec = build_warp(w, z, cfg.truncation_depth);
         Rng rng = task_rng(cfg, "witness", i);
         const BigFloat tol = tolerance(cfg.precision_bits);
         Outcome o;
         const long last = spec.last_index();
         for (unsigned k = 0; k < cfg.witness_samples; ++k) {
           Rat x;
           if (rng.range(0, 3) == 0) {
             x = spec.p(0) - rng.rat(0, 3, 8) - Rat(1, 64);
           } else {
             long piece = rng.range(0, last - 1);
             x = spec.p(piece) + (spec.p(piece + 1) - spec.p(piece)) * Rat(rng.range(0, 63), 64);
           }
           ++o.checks;
           FPathWitness wit = witness_for_warp(spec, to_big(x));
           if (!verify_witness(wit, tol) || !verify_witness(reverse_witness(wit), tol) ||
               abs(BigFloat(wit.points.back() - warp_eval(spec, to_big(x)))) > tol) {
             ++o.failures;
             o.counterexamples.push_back(json{{"task", i}, {"w", format_rat(w)}, {"z", format_rat(z)}, {"x", format_rat(x)},
                                              {"witness", to_json(wit)}});
           }
         }
         return o;
       }));
  return r;
}

SuiteResult suite_transition(const ExperimentConfig& cfg) {
  SuiteResult r = named("transition_values");
  PrecisionScope scope(cfg.precision_bits);
  const BigFloat tol = tolerance(cfg.precision_bits);
  auto check = [&](bool ok, const std::string& what) {
    ++r.checks;
    if (!ok) {
      ++r.failures;
      if (r.counterexamples.size() < kMaxCounterexamples) r.counterexamples.push_back(json{{"check", what}});
    }
  };
  check(s(BigFloat(0)) == 0, "s(0) = 0");
  check(s(BigFloat(1)) == 1, "s(1) = 1");
  check(abs(BigFloat(s(BigFloat(1) / 2) - BigFloat(1) / 2)) <= tol, "s(1/2) = 1/2");
  BigFloat worst(0);
  for (unsigned j = 0; j < cfg.transition_grid; ++j) {
    BigFloat x = BigFloat(j) / BigFloat(cfg.transition_grid);
    BigFloat dev = abs(BigFloat(s(x) + s(BigFloat(1) - x) - 1));
    worst = std::max(worst, dev);
    check(dev <= tol, "s(x) + s(1 - x) = 1 at x = " + std::to_string(j) + "/" + std::to_string(cfg.transition_grid));
  }
  Jet j0 = s_jet(BigFloat(0), 6), j1 = s_jet(BigFloat(1), 6);
  for (unsigned k = 1; k <= 6; ++k) {
    check(j0.derivative(k) == 0, "s^(" + std::to_string(k) + ")(0) = 0");
    check(j1.derivative(k) == 0, "s^(" + std::to_string(k) + ")(1) = 0");
  }
  r.details = json{{"symmetryMaxDeviation", worst.str(6, std::ios_base::scientific)}, {"tolerance", tol.str(6, std::ios_base::scientific)}};
  return r;
}

}  // namespace

CampaignReport run_campaign(const ExperimentConfig& cfg) {
  static const std::map<std::string, std::function<SuiteResult(const ExperimentConfig&)>> table = {
      {"error_set", suite_error_set},
      {"equivariance", suite_equivariance},
      {"equivariance_ht_control", suite_equivariance_control},
      {"well_definedness", suite_well_definedness},
      {"well_definedness_control", suite_well_definedness_control},
      {"periodic_extension", suite_periodic_extension},
      {"affine_extension", suite_affine_extension},
      {"period_match", suite_period_match},
      {"warp_algebra", suite_warp_algebra},
      {"smooth_construction", suite_smooth},
      {"witness", suite_witness},
      {"transition_values", suite_transition},
  };
  CampaignReport report;
  report.config = cfg;
  const auto& names = cfg.suites.empty() ? kSuites : cfg.suites;
  for (const auto& name : names) {
    auto t0 = std::chrono::steady_clock::now();
    SuiteResult res;
    try {
      res = table.at(name)(cfg);
    } catch (const std::exception& e) {
      res.name = name;
      res.checks += 1;
      res.failures += 1;
      res.counterexamples.push_back(json{{"exception", e.what()}});
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.suites.push_back(std::move(res));
  }
  return report;
}

// ---- plot data ----

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

void close_out(std::ofstream& out, const std::string& path) {
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path);
}

std::string dec(const BigFloat& x, int digits = 30) { return x.str(digits, std::ios_base::scientific); }

}  // namespace

void write_s_samples(const std::string& path, unsigned n) {
  if (n == 0) throw std::invalid_argument("need at least one interval");
  auto out = open_out(path);
  out << "x,s\n";
  for (unsigned j = 0; j <= n; ++j) {
    BigFloat x = BigFloat(j) / BigFloat(n);
    out << dec(x) << "," << dec(s(x)) << "\n";
  }
  close_out(out, path);
}

void write_warp_samples(const std::string& path, const SmoothWarpSpec& spec, const Rat& lo, const Rat& hi,
                        unsigned n) {
  if (n == 0 || !(lo < hi)) throw std::invalid_argument("need lo < hi and at least one interval");
  auto out = open_out(path);
  out << "x,t\n";
  const Rat gap_lo = spec.p(spec.last_index());
  for (unsigned j = 0; j <= n; ++j) {
    Rat x = lo + (hi - lo) * Rat(static_cast<long>(j), static_cast<long>(n));
    if (x >= gap_lo && x < spec.w) continue;
    out << format_rat(x) << "," << dec(warp_eval(spec, to_big(x))) << "\n";
  }
  close_out(out, path);
}

void write_trend_table(const std::string& path, const FlatnessReport& r) {
  auto out = open_out(path);
  out << "i,left_quotient\n";
  for (std::size_t i = 0; i < r.left_quotients.size(); ++i) out << i << "," << dec(r.left_quotients[i]) << "\n";
  close_out(out, path);
}

json to_json(const FlatnessReport& r) {
  json bounds = json::array();
  for (const auto& b : r.bounds) {
    bounds.push_back(json{{"k", b.k}, {"gridDepth", b.grid_depth}, {"gridMax", dec(b.grid_max)},
                          {"safety", dec(b.safety, 3)}, {"bound", dec(b.bound())}});
  }
  json pieces = json::array();
  for (const auto& p : r.pieces) {
    json m = json::array(), g = json::array();
    for (const auto& v : p.max_abs_deriv) m.push_back(dec(v, 12));
    for (const auto& v : p.margin) g.push_back(dec(v, 12));
    pieces.push_back(json{{"index", p.index}, {"maxAbsDeriv", m}, {"margin", g}});
  }
  json trend = json::array();
  for (const auto& q : r.left_quotients) trend.push_back(dec(q, 12));
  json viol = json::array();
  for (const auto& v : r.violations) viol.push_back(json{{"piece", v.index}, {"k", v.k}, {"what", v.what}});
  return json{{"precisionBits", r.precision_bits},
              {"kmax", r.kmax},
              {"samplesPerPiece", r.samples_per_piece},
              {"bounds", bounds},
              {"pieces", pieces},
              {"pqFailures", r.pq_failures},
              {"leftQuotients", trend},
              {"leftTrendOk", r.left_trend_ok},
              {"rightFlat", r.right_flat},
              {"monotone", r.monotone},
              {"seamsFlat", r.seams_flat},
              {"violations", viol},
              {"passed", r.passed()}};
}

}  // namespace anonlab
