#pragma once

// Exactly representable scenarios f : R -> S.
//
// Three classes are closed under composition with affine warps and under the
// periodic / affine-invariant extension constructions:
//   * step scenarios: finitely many jumps;
//   * periodic step scenarios: a step kernel repeated with a rational period;
//   * log-periodic scenarios: invariant under x -> A*(x - p) + p for a rational
//     ratio A > 1, so jumps accumulate at the fixed point p.
// All pieces are right-continuous: a jump at b belongs to the piece [b, next).
// Every constructor normalizes, so operator== decides equality of functions.

#include "anonlab/rational.hpp"
#include "anonlab/timewarp.hpp"

#include <compare>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace anonlab {

struct State {
  std::string id;
  auto operator<=>(const State&) const = default;
};

/// Piecewise-constant pattern on a band [lo, hi) glued cyclically, hi ~ lo.
/// Constant patterns have no starts and exactly one value. Otherwise starts
/// are strictly increasing inside the band, one value per start, and
/// cyclically adjacent values differ.
struct Pattern {
  std::vector<Rat> starts;
  std::vector<State> values;

  static Pattern constant(State v) { return Pattern{{}, {std::move(v)}}; }
  bool is_constant() const { return starts.empty(); }
  bool operator==(const Pattern&) const = default;
};

struct StepScenario {
  std::vector<Rat> breakpoints;
  std::vector<State> values;  // breakpoints.size() + 1 entries
  bool operator==(const StepScenario&) const = default;
};

/// Kernel band is [0, period); the stored period is the least period.
struct PeriodicScenario {
  Rat period;
  Pattern kernel;
  bool operator==(const PeriodicScenario&) const = default;
};

/// Offsets u = x - fixed_point. The minus band is [-ratio, -1), the plus band
/// [1, ratio). ratio is the least rational ratio leaving the function invariant.
struct LogPeriodicScenario {
  Rat fixed_point;
  Rat ratio;
  Pattern minus;
  State at_fixed;
  Pattern plus;
  bool operator==(const LogPeriodicScenario&) const = default;
};

enum class ScenarioKind { step, periodic, log_periodic };

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The requested object exists mathematically but leaves the three classes.
class UnrepresentableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Scenario {
 public:
  static Scenario constant(State v);
  static Scenario step(std::vector<Rat> breakpoints, std::vector<State> values);
  /// Starts may come in any order but must lie in [0, period).
  static Scenario periodic(Rat period, std::vector<Rat> starts, std::vector<State> values);
  /// Pattern starts are offsets from the fixed point inside their bands.
  static Scenario log_periodic(Rat fixed_point, Rat ratio, Pattern minus, State at_fixed, Pattern plus);

  ScenarioKind kind() const { return static_cast<ScenarioKind>(rep_.index()); }
  bool is_constant() const;

  const StepScenario* as_step() const { return std::get_if<StepScenario>(&rep_); }
  const PeriodicScenario* as_periodic() const { return std::get_if<PeriodicScenario>(&rep_); }
  const LogPeriodicScenario* as_log() const { return std::get_if<LogPeriodicScenario>(&rep_); }

  bool operator==(const Scenario&) const = default;

  std::string str() const;

 private:
  using Rep = std::variant<StepScenario, PeriodicScenario, LogPeriodicScenario>;
  explicit Scenario(Rep rep) : rep_(std::move(rep)) {}
  Rep rep_;
};

State eval(const Scenario& f, const Rat& x);

/// True iff f and g agree at every point of (-inf, x).
bool restrict_eq(const Scenario& f, const Scenario& g, const Rat& x);

/// f ∘ t.
Scenario compose_warp(const Scenario& f, const AffineWarp& t);

struct PeriodSet {
  enum class Kind { none, all_nonzero, multiples };
  Kind kind = Kind::none;
  Rat base;  // meaningful for multiples

  bool contains(const Rat& b) const;
  bool operator==(const PeriodSet&) const = default;
};

PeriodSet periods_of(const Scenario& f);

/// f restricted to (-inf, x) equals (f ∘ shift(b)) restricted to (-inf, x). b != 0.
bool is_past_periodic(const Scenario& f, const Rat& x, const Rat& b);

/// A scenario with period |b| agreeing with f below x. Constant results come
/// back as constant step scenarios. Throws PreconditionError when f is not
/// past-periodic on (-inf, x) with period b.
Scenario periodic_extension(const Scenario& f, const Rat& x, const Rat& b);

/// A scenario g with g ∘ t = g agreeing with f below x. Pure shifts delegate
/// to periodic_extension. Throws PreconditionError when t is the identity or
/// f is not past-invariant under t, and UnrepresentableError when the
/// orbit-filled function has infinitely many jumps in a fundamental band.
Scenario affine_extension(const Scenario& f, const Rat& x, const AffineWarp& t);

/// t^n(y) in closed form.
Rat orbit(const AffineWarp& t, const Rat& y, long n);

/// For periodic f past-periodic below x with period b: whether b is a period of f.
bool check_period_match(const Scenario& f, const Rat& x, const Rat& b);

/// Jumps of f inside [lo, hi): the first entry is (lo, f(lo)), then every
/// breakpoint in (lo, hi) with the value taken from there on. Throws
/// UnrepresentableError when a log-periodic fixed point lies in [lo, hi].
std::vector<std::pair<Rat, State>> pieces_in(const Scenario& f, const Rat& lo, const Rat& hi);

/// f restricted to (-inf, cut), stored shifted so the cut sits at 0.
class PastView {
 public:
  PastView(const Scenario& f, const Rat& cut);

  /// y -> f(y + cut); only its values on (-inf, 0) are meaningful.
  const Scenario& shifted() const { return shifted_; }
  const Rat& cut() const { return cut_; }

  /// Equality of the observed pasts, independent of where the cut was.
  bool operator==(const PastView& other) const { return restrict_eq(shifted_, other.shifted_, Rat(0)); }

 private:
  Scenario shifted_;
  Rat cut_;
};

PastView past_view(const Scenario& f, const Rat& x);

}  // namespace anonlab
