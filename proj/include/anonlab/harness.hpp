#pragma once

// Seeded generators, property campaigns and plot data.

#include "anonlab/predictor.hpp"
#include "anonlab/scenario.hpp"
#include "anonlab/smooth.hpp"

#include <json.hpp>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace anonlab {

/// Agents start, start + step, ... strictly below stop.
struct GridSpec {
  Rat start{-5}, stop{5}, step{1, 100};

  std::vector<Rat> points() const;
  /// "start:stop:step", each part a rational or decimal.
  static GridSpec parse(const std::string& text);
  std::string str() const;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  unsigned alphabet_size = 3;
  unsigned catalog_size = 24;
  GridSpec grid;
  Mode mode = Mode::t2;
  unsigned precision_bits = kDefaultPrecisionBits;
  unsigned truncation_depth = 20;
  unsigned kmax = 4;

  // Suite sizes.
  unsigned error_pairs = 200;
  unsigned equivariance_triples = 100;
  unsigned equivariance_grid = 100;
  unsigned wd_queries = 200;
  unsigned wd_warps = 8;
  unsigned extension_instances = 500;
  unsigned warp_pairs = 1000;
  unsigned smooth_pairs = 20;
  unsigned witness_samples = 100;
  unsigned transition_grid = 1000;

  /// Empty means every suite.
  std::vector<std::string> suites;
  /// "none" or "skip_closure" (catalogs lose their closure entries).
  std::string mutation = "none";
  bool include_timing = false;
};

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);

/// The precision from ANONLAB_PRECISION, or the built-in default.
unsigned default_precision_from_env();

std::vector<std::string> all_suites();

/// Seeded source with modulo picks, so streams are reproducible across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  std::uint64_t next() { return eng_(); }
  /// Uniform-ish integer in [lo, hi].
  long range(long lo, long hi) { return lo + static_cast<long>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }
  bool coin() { return next() % 2 == 0; }
  template <class T>
  const T& pick(const std::vector<T>& v) { return v.at(next() % v.size()); }
  /// n / d with d in [1, max_den] and n / d in [lo, hi].
  Rat rat(long lo, long hi, long max_den);

 private:
  std::mt19937_64 eng_;
};

std::vector<State> alphabet(unsigned size);

Scenario random_step(Rng& rng, const std::vector<State>& states, unsigned min_jumps, unsigned max_jumps);
Scenario random_periodic(Rng& rng, const std::vector<State>& states);
Scenario random_log_periodic(Rng& rng, const std::vector<State>& states);
AffineWarp random_warp(Rng& rng);

/// Constants for every state, then random periodic, affine-invariant and
/// multi-jump entries, each multi-jump entry followed by the one-jump step
/// its single-jump pasts extend to. Tier-sorted and certified closed unless
/// the mutation is skip_closure.
Catalog gen_catalog(const ExperimentConfig& cfg, Rng& rng);

/// Shorthand seeding a fresh Rng from cfg.seed.
Catalog gen_catalog(const ExperimentConfig& cfg);

struct SuiteResult {
  std::string name;
  bool negative_control = false;  // passes when it observes violations
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::size_t observed_violations = 0;
  std::vector<nlohmann::json> counterexamples;  // first few, full inputs
  nlohmann::json details;
  double seconds = 0;
  bool passed() const;
};

struct CampaignReport {
  ExperimentConfig config;
  std::vector<SuiteResult> suites;
  bool passed() const;
  const SuiteResult* find(const std::string& name) const;
  /// Timing only when the config asks for it, so reruns compare byte for byte.
  nlohmann::json to_json() const;
};

CampaignReport run_campaign(const ExperimentConfig& cfg);

/// (x, s(x)) at n + 1 evenly spaced points of [0, 1].
void write_s_samples(const std::string& path, unsigned n);
/// (x, t(x)) at n + 1 evenly spaced points of [lo, hi], skipping the truncated gap.
void write_warp_samples(const std::string& path, const SmoothWarpSpec& spec, const Rat& lo, const Rat& hi,
                        unsigned n);
/// (i, (z - q_i) / (w - p_i)) from a flatness report.
void write_trend_table(const std::string& path, const FlatnessReport& r);

/// JSON form of a flatness report.
nlohmann::json to_json(const FlatnessReport& r);

}  // namespace anonlab
