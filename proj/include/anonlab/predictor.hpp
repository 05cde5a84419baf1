#pragma once

// Least-consistent predictors over a finite ordered catalog.
//
// The catalog's index order plays the role of the well-order: the agent at x
// picks the first entry consistent with what it has seen and reads off its
// value at the present. `ht` consistency is exact agreement of the pasts;
// `t2` consistency allows composing the entry with any positive-slope affine
// warp, which makes the predictor invariant under such warps of time.

#include "anonlab/scenario.hpp"
#include "anonlab/timewarp.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace anonlab {

enum class Tier { periodic = 0, affine_invariant = 1, other = 2 };

/// periodic: has a period (constants included); affine_invariant: f ∘ t = f
/// for a nonidentity affine t (log-periodic, or exactly one jump); other: the rest.
Tier tier_of(const Scenario& f);
std::string to_string(Tier t);

enum class Mode { ht, t2 };
std::string to_string(Mode m);
Mode parse_mode(const std::string& s);

class NoConsistentEntry : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ClosureViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Catalog {
 public:
  /// Rejects duplicate entries and entries out of tier order
  /// (periodic, then affine-invariant, then other).
  explicit Catalog(std::vector<Scenario> entries);

  std::size_t size() const { return entries_.size(); }
  const Scenario& entry(std::size_t i) const { return entries_.at(i); }
  Tier tier(std::size_t i) const { return tiers_.at(i); }
  const std::vector<Scenario>& entries() const { return entries_; }

  /// Runs check_closure over the cuts and remembers success; throws
  /// ClosureViolation with the first violation otherwise.
  void certify(const std::vector<Rat>& cuts);
  bool closure_certified() const { return certified_; }

 private:
  std::vector<Scenario> entries_;
  std::vector<Tier> tiers_;
  bool certified_ = false;
};

struct Guess {
  State state;
  std::size_t witness_index = 0;
  /// f agrees with entry(witness_index) ∘ witness_warp below the cut and the
  /// guess is entry(witness_index)(witness_warp(cut)). Absolute coordinates.
  AffineWarp witness_warp;
};

bool consistency_ht(const Scenario& g, const PastView& pv);

/// Every warp found by the structural search that makes g ∘ t agree with the
/// observed past, each verified exactly, best first: smallest |slope - 1|,
/// then smallest |offset| measured with the cut at 0. Absolute coordinates.
std::vector<AffineWarp> consistent_warps(const Scenario& g, const PastView& pv);

/// The first of consistent_warps, if any.
std::optional<AffineWarp> consistency_t2(const Scenario& g, const PastView& pv);

Guess ht_predict(const Catalog& cat, const PastView& pv);

/// Requires a certified catalog (ClosureViolation otherwise).
Guess t2_predict(const Catalog& cat, const PastView& pv);

/// t2_predict without the certification requirement.
Guess t2_select(const Catalog& cat, const PastView& pv);

Guess predict(const Catalog& cat, const PastView& pv, Mode mode);

struct ClosureReport {
  struct Violation {
    std::size_t entry;
    Rat cut;
    std::string kind;  // "past-periodic" or "past-affine-invariant"
    std::string detail;
  };
  std::size_t checks = 0;
  std::vector<Violation> violations;
  bool passed() const { return violations.empty(); }
};

/// For every non-periodic entry and every cut (the given ones plus points
/// around the entry's own jumps), checks that whenever the entry's past is
/// past-periodic (resp. past-affine-invariant while the entry itself is not
/// affine-invariant) some entry of the matching tier is consistent with it.
ClosureReport check_closure(const Catalog& cat, const std::vector<Rat>& cuts);

struct EquivarianceReport {
  struct Violation {
    Rat agent;
    State warped;  // P(f ∘ t)(x)
    State direct;  // P(f)(t(x))
    std::size_t warped_index;
    std::size_t direct_index;
  };
  std::size_t checked = 0;
  std::vector<Violation> violations;
};

/// Compares P(f ∘ t)(x) with P(f)(t(x)) on every grid agent, in guessed state
/// and in witness index. Runs unchecked in t2 mode.
EquivarianceReport equivariance_check(const Catalog& cat, const Scenario& f, const AffineWarp& t,
                                      const std::vector<Rat>& grid, Mode mode = Mode::t2);

struct ErrorSetReport {
  std::vector<Rat> agents;
  std::vector<Guess> guesses;
  std::vector<State> truths;
  std::vector<std::size_t> errors;       // positions into agents
  std::vector<std::size_t> index_trace;  // witness index per agent
};

ErrorSetReport error_set(const Catalog& cat, const Scenario& f, const std::vector<Rat>& grid, Mode mode);

/// Problems with an error-set report: witness indices decreasing in the cut,
/// erring agents whose indices fail to increase strictly, or more erring
/// agents than catalog entries. Empty when all hold.
std::vector<std::string> error_set_violations(const ErrorSetReport& r, std::size_t catalog_size);

struct WellDefinednessReport {
  std::size_t index = 0;
  std::vector<AffineWarp> warps;  // absolute coordinates
  std::vector<State> guesses;
  bool agree() const;
};

/// Collects up to warp_samples distinct verified warps for the least
/// T2-consistent entry and the guess each one yields.
WellDefinednessReport well_definedness_check(const Catalog& cat, const PastView& pv, std::size_t warp_samples);

}  // namespace anonlab
