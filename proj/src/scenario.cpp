#include "anonlab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace anonlab {

namespace {

// ---------------------------------------------------------------------------
// Bands. A periodic kernel lives on [0, P) with gluing x ~ x + P; a log side
// lives on [1, A) or [-A, -1) in offset coordinates with gluing u ~ A*u.

enum class BandKind { periodic, minus, plus };

struct Band {
  BandKind kind;
  Rat size;  // period or ratio

  Rat reduce(const Rat& u) const {
    if (kind == BandKind::periodic) return mod_pos(u, size);
    // log sides: move u by powers of size into the band
    double la = std::log2(to_double(size));
    long n = -static_cast<long>(std::floor(log2_abs(u) / la));
    Rat v = u * pow_int(size, n);
    if (kind == BandKind::plus) {
      while (v < 1) v *= size;
      while (v >= size) v /= size;
    } else {
      while (v >= -1) v *= size;
      while (v < -size) v /= size;
    }
    return v;
  }
};

const State& lookup(const Pattern& p, const Rat& reduced) {
  if (p.is_constant()) return p.values.front();
  auto it = std::upper_bound(p.starts.begin(), p.starts.end(), reduced);
  if (it == p.starts.begin()) return p.values.back();
  return p.values[static_cast<std::size_t>(it - p.starts.begin()) - 1];
}

bool in_band(const Band& b, const Rat& u) {
  switch (b.kind) {
    case BandKind::periodic: return u >= 0 && u < b.size;
    case BandKind::plus: return u >= 1 && u < b.size;
    case BandKind::minus: return u >= -b.size && u < -1;
  }
  return false;
}

// Sorts, validates, and merges cyclically equal neighbours.
Pattern make_pattern(const Band& band, std::vector<Rat> starts, std::vector<State> values) {
  if (values.empty()) throw std::invalid_argument("pattern needs at least one value");
  if (starts.empty()) {
    if (values.size() != 1) throw std::invalid_argument("constant pattern must carry exactly one value");
    return Pattern::constant(values.front());
  }
  if (starts.size() != values.size()) throw std::invalid_argument("pattern starts and values differ in length");
  std::vector<std::pair<Rat, State>> items;
  items.reserve(starts.size());
  for (std::size_t i = 0; i < starts.size(); ++i) {
    if (!in_band(band, starts[i])) throw std::invalid_argument("pattern start " + format_rat(starts[i]) + " outside its band");
    items.emplace_back(std::move(starts[i]), std::move(values[i]));
  }
  std::sort(items.begin(), items.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
  for (std::size_t i = 1; i < items.size(); ++i) {
    if (items[i].first == items[i - 1].first) throw std::invalid_argument("duplicate pattern start " + format_rat(items[i].first));
  }
  bool changed = true;
  while (changed && items.size() > 1) {
    changed = false;
    for (std::size_t i = 0; i < items.size(); ++i) {
      std::size_t prev = (i + items.size() - 1) % items.size();
      if (items[i].second == items[prev].second) {
        items.erase(items.begin() + static_cast<long>(i));
        changed = true;
        break;
      }
    }
  }
  if (items.size() == 1) return Pattern::constant(items.front().second);
  Pattern p;
  for (auto& [s, v] : items) {
    p.starts.push_back(std::move(s));
    p.values.push_back(std::move(v));
  }
  return p;
}

// Whether the pattern is unchanged by the band map u -> map(u).
template <class Map>
bool invariant_under(const Pattern& p, const Band& band, Map map) {
  if (p.is_constant()) return true;
  for (std::size_t i = 0; i < p.starts.size(); ++i) {
    Rat image = band.reduce(map(p.starts[i]));
    auto it = std::lower_bound(p.starts.begin(), p.starts.end(), image);
    if (it == p.starts.end() || *it != image) return false;
    if (p.values[static_cast<std::size_t>(it - p.starts.begin())] != p.values[i]) return false;
  }
  return true;
}

Pattern restrict_to(const Pattern& p, const Band& smaller) {
  Pattern out;
  for (std::size_t i = 0; i < p.starts.size(); ++i) {
    if (in_band(smaller, p.starts[i])) {
      out.starts.push_back(p.starts[i]);
      out.values.push_back(p.values[i]);
    }
  }
  return out;
}

std::vector<unsigned> divisors_desc(std::size_t m) {
  std::vector<unsigned> out;
  for (std::size_t d = m; d >= 2; --d) {
    if (m % d == 0) out.push_back(static_cast<unsigned>(d));
  }
  return out;
}

// Least rational ratio r (with A = r^d) leaving one log side invariant,
// and the side re-expressed on the band of that ratio.
std::pair<Rat, Pattern> minimal_side(const Pattern& p, const Rat& ratio, BandKind kind) {
  if (p.is_constant()) return {ratio, p};
  Band band{kind, ratio};
  for (unsigned d : divisors_desc(p.starts.size())) {
    auto r = rational_root(ratio, d);
    if (!r) continue;
    if (invariant_under(p, band, [&](const Rat& u) { return u * *r; })) {
      return {*r, restrict_to(p, Band{kind, *r})};
    }
  }
  return {ratio, p};
}

bool sides_equal(const Pattern& a, const Rat& ra, const Pattern& b, const Rat& rb, BandKind kind) {
  if (a.is_constant() || b.is_constant()) return a == b;
  auto [ma, pa] = minimal_side(a, ra, kind);
  auto [mb, pb] = minimal_side(b, rb, kind);
  return ma == mb && pa == pb;
}

// Jump offsets of one log side strictly inside (ulo, uhi), same sign as the side.
std::vector<std::pair<Rat, State>> side_jumps(const Pattern& p, const Rat& ratio, BandKind kind,
                                              const Rat& ulo, const Rat& uhi) {
  std::vector<std::pair<Rat, State>> out;
  if (p.is_constant()) return out;
  double la = std::log2(to_double(ratio));
  // Scaled copies of the band: A^n * band. Cover magnitudes between |near| and |far|.
  Rat near = kind == BandKind::plus ? ulo : abs_rat(uhi);
  Rat far = kind == BandKind::plus ? uhi : abs_rat(ulo);
  long n = (near > 0 ? static_cast<long>(std::floor(log2_abs(near) / la)) : 0) - 2;
  for (Rat scale = pow_int(ratio, n); scale <= far * ratio; scale *= ratio) {
    for (std::size_t i = 0; i < p.starts.size(); ++i) {
      Rat u = p.starts[i] * scale;
      if (u > ulo && u < uhi) out.emplace_back(u, p.values[i]);
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
  return out;
}

// Left tail as x -> -inf.
enum class TailKind { constant, periodic, log_left };

TailKind tail_kind(const Scenario& f) {
  if (f.as_periodic()) return TailKind::periodic;
  if (auto lg = f.as_log(); lg && !lg->minus.is_constant()) return TailKind::log_left;
  return TailKind::constant;
}

// Critical points of a scenario whose left tail is constant.
std::vector<Rat> critical_points(const Scenario& f) {
  if (auto st = f.as_step()) return st->breakpoints;
  if (auto lg = f.as_log()) return {lg->fixed_point};
  return {};
}

}  // namespace

// ---------------------------------------------------------------------------

Scenario Scenario::constant(State v) { return Scenario(StepScenario{{}, {std::move(v)}}); }

Scenario Scenario::step(std::vector<Rat> breakpoints, std::vector<State> values) {
  if (values.size() != breakpoints.size() + 1) {
    throw std::invalid_argument("step scenario needs one more value than breakpoints");
  }
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i - 1] < breakpoints[i])) throw std::invalid_argument("step breakpoints must be strictly increasing");
  }
  StepScenario s;
  s.values.push_back(std::move(values[0]));
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (values[i + 1] == s.values.back()) continue;
    s.breakpoints.push_back(std::move(breakpoints[i]));
    s.values.push_back(std::move(values[i + 1]));
  }
  return Scenario(std::move(s));
}

Scenario Scenario::periodic(Rat period, std::vector<Rat> starts, std::vector<State> values) {
  if (period <= 0) throw std::invalid_argument("period must be positive");
  Band band{BandKind::periodic, period};
  Pattern k = make_pattern(band, std::move(starts), std::move(values));
  if (k.is_constant()) return constant(k.values.front());
  for (unsigned d : divisors_desc(k.starts.size())) {
    Rat sub = period / d;
    if (invariant_under(k, band, [&](const Rat& u) { return u + sub; })) {
      period = sub;
      k = restrict_to(k, Band{BandKind::periodic, sub});
      break;
    }
  }
  return Scenario(PeriodicScenario{std::move(period), std::move(k)});
}

Scenario Scenario::log_periodic(Rat fixed_point, Rat ratio, Pattern minus, State at_fixed, Pattern plus) {
  if (ratio <= 1) throw std::invalid_argument("log-periodic ratio must exceed 1");
  Band mband{BandKind::minus, ratio};
  Band pband{BandKind::plus, ratio};
  minus = make_pattern(mband, std::move(minus.starts), std::move(minus.values));
  plus = make_pattern(pband, std::move(plus.starts), std::move(plus.values));
  if (minus.is_constant() && plus.is_constant()) {
    const State& l = minus.values.front();
    const State& r = plus.values.front();
    if (at_fixed == r) {
      if (l == r) return constant(r);
      return step({fixed_point}, {l, r});
    }
    // Only the point anomaly at p remains; every ratio works, 2 is the canonical one.
    return Scenario(LogPeriodicScenario{std::move(fixed_point), Rat(2), std::move(minus), std::move(at_fixed), std::move(plus)});
  }
  std::size_t g = 0;
  if (!minus.is_constant()) g = std::gcd(g, minus.starts.size());
  if (!plus.is_constant()) g = std::gcd(g, plus.starts.size());
  for (unsigned d : divisors_desc(g)) {
    auto r = rational_root(ratio, d);
    if (!r) continue;
    auto by_r = [&](const Rat& u) { return u * *r; };
    if (invariant_under(minus, mband, by_r) && invariant_under(plus, pband, by_r)) {
      if (!minus.is_constant()) minus = restrict_to(minus, Band{BandKind::minus, *r});
      if (!plus.is_constant()) plus = restrict_to(plus, Band{BandKind::plus, *r});
      ratio = *r;
      break;
    }
  }
  return Scenario(LogPeriodicScenario{std::move(fixed_point), std::move(ratio), std::move(minus), std::move(at_fixed), std::move(plus)});
}

bool Scenario::is_constant() const {
  auto st = as_step();
  return st && st->breakpoints.empty();
}

namespace {

void print_pattern(std::ostream& os, const Pattern& p) {
  if (p.is_constant()) {
    os << p.values.front().id;
    return;
  }
  os << "{";
  for (std::size_t i = 0; i < p.starts.size(); ++i) {
    if (i) os << ", ";
    os << format_rat(p.starts[i]) << ":" << p.values[i].id;
  }
  os << "}";
}

}  // namespace

std::string Scenario::str() const {
  std::ostringstream os;
  if (auto st = as_step()) {
    os << "step(" << st->values.front().id;
    for (std::size_t i = 0; i < st->breakpoints.size(); ++i) {
      os << " |" << format_rat(st->breakpoints[i]) << " " << st->values[i + 1].id;
    }
    os << ")";
  } else if (auto pr = as_periodic()) {
    os << "periodic(" << format_rat(pr->period) << ", ";
    print_pattern(os, pr->kernel);
    os << ")";
  } else if (auto lg = as_log()) {
    os << "logperiodic(p=" << format_rat(lg->fixed_point) << ", a=" << format_rat(lg->ratio) << ", minus=";
    print_pattern(os, lg->minus);
    os << ", at=" << lg->at_fixed.id << ", plus=";
    print_pattern(os, lg->plus);
    os << ")";
  }
  return os.str();
}

// ---------------------------------------------------------------------------

State eval(const Scenario& f, const Rat& x) {
  if (auto st = f.as_step()) {
    auto it = std::upper_bound(st->breakpoints.begin(), st->breakpoints.end(), x);
    return st->values[static_cast<std::size_t>(it - st->breakpoints.begin())];
  }
  if (auto pr = f.as_periodic()) {
    return lookup(pr->kernel, mod_pos(x, pr->period));
  }
  const auto& lg = *f.as_log();
  Rat u = x - lg.fixed_point;
  if (u == 0) return lg.at_fixed;
  if (u > 0) return lookup(lg.plus, Band{BandKind::plus, lg.ratio}.reduce(u));
  return lookup(lg.minus, Band{BandKind::minus, lg.ratio}.reduce(u));
}

bool restrict_eq(const Scenario& f, const Scenario& g, const Rat& x) {
  if (f == g) return true;
  TailKind tk = tail_kind(f);
  if (tk != tail_kind(g)) return false;

  // Two periodic functions agreeing on a left half-line agree everywhere
  // (rational periods have a common multiple), and f != g here.
  if (tk == TailKind::periodic) return false;

  if (tk == TailKind::log_left) {
    // Agreement on a left tail forces a common fixed point: otherwise the tail
    // would be invariant under a nonzero shift and under an expansion at once.
    const auto& lf = *f.as_log();
    const auto& lgs = *g.as_log();
    if (lf.fixed_point != lgs.fixed_point) return false;
    if (!sides_equal(lf.minus, lf.ratio, lgs.minus, lgs.ratio, BandKind::minus)) return false;
    if (x <= lf.fixed_point) return true;
    if (lf.at_fixed != lgs.at_fixed) return false;
    // Agreement on (p, p + eps) spreads to all of (p, inf) by invariance.
    return sides_equal(lf.plus, lf.ratio, lgs.plus, lgs.ratio, BandKind::plus);
  }

  // Constant left tails: walk the finitely many critical points below x.
  std::vector<Rat> pts = critical_points(f);
  for (const Rat& r : critical_points(g)) pts.push_back(r);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  pts.erase(std::remove_if(pts.begin(), pts.end(), [&](const Rat& r) { return r >= x; }), pts.end());

  if (pts.empty()) return eval(f, x - 1) == eval(g, x - 1);
  if (eval(f, pts.front() - 1) != eval(g, pts.front() - 1)) return false;

  auto accumulates_right_of = [](const Scenario& h, const Rat& at) {
    auto lg = h.as_log();
    return lg && lg->fixed_point == at && !lg->plus.is_constant();
  };

  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Rat& c = pts[i];
    if (eval(f, c) != eval(g, c)) return false;
    bool fa = accumulates_right_of(f, c);
    bool ga = accumulates_right_of(g, c);
    if (fa || ga) {
      if (!(fa && ga)) return false;
      const auto& lf = *f.as_log();
      const auto& lgs = *g.as_log();
      // Both are log-periodic about c with constant left sides; nothing else follows.
      return sides_equal(lf.plus, lf.ratio, lgs.plus, lgs.ratio, BandKind::plus);
    }
    Rat end = i + 1 < pts.size() ? pts[i + 1] : x;
    Rat mid = (c + end) / 2;
    if (eval(f, mid) != eval(g, mid)) return false;
  }
  return true;
}

Scenario compose_warp(const Scenario& f, const AffineWarp& t) {
  const Rat& a = t.slope();
  const Rat& c = t.offset();
  if (auto st = f.as_step()) {
    std::vector<Rat> bps;
    bps.reserve(st->breakpoints.size());
    for (const Rat& b : st->breakpoints) bps.push_back((b - c) / a);
    return Scenario::step(std::move(bps), st->values);
  }
  if (auto pr = f.as_periodic()) {
    Rat period = pr->period / a;
    std::vector<Rat> starts;
    for (const Rat& s : pr->kernel.starts) starts.push_back(mod_pos((s - c) / a, period));
    return Scenario::periodic(period, std::move(starts), pr->kernel.values);
  }
  const auto& lg = *f.as_log();
  // (f∘t)(p' + u) = f(p + a*u) with p' = t^-1(p).
  Rat p = (lg.fixed_point - c) / a;
  auto moved = [&](const Pattern& pat, BandKind kind) {
    if (pat.is_constant()) return pat;
    Band band{kind, lg.ratio};
    Pattern out;
    for (std::size_t i = 0; i < pat.starts.size(); ++i) {
      out.starts.push_back(band.reduce(pat.starts[i] / a));
      out.values.push_back(pat.values[i]);
    }
    return out;
  };
  return Scenario::log_periodic(p, lg.ratio, moved(lg.minus, BandKind::minus), lg.at_fixed,
                                moved(lg.plus, BandKind::plus));
}

bool PeriodSet::contains(const Rat& b) const {
  if (b == 0) return false;
  switch (kind) {
    case Kind::none: return false;
    case Kind::all_nonzero: return true;
    case Kind::multiples: {
      Rat q = b / base;
      return boost::multiprecision::denominator(q) == 1;
    }
  }
  return false;
}

PeriodSet periods_of(const Scenario& f) {
  if (f.is_constant()) return {PeriodSet::Kind::all_nonzero, Rat(0)};
  if (auto pr = f.as_periodic()) return {PeriodSet::Kind::multiples, pr->period};
  return {PeriodSet::Kind::none, Rat(0)};
}

bool is_past_periodic(const Scenario& f, const Rat& x, const Rat& b) {
  if (b == 0) throw PreconditionError("past-periodicity needs a nonzero period");
  return restrict_eq(f, compose_warp(f, AffineWarp::shift(b)), x);
}

std::vector<std::pair<Rat, State>> pieces_in(const Scenario& f, const Rat& lo, const Rat& hi) {
  std::vector<std::pair<Rat, State>> out;
  out.emplace_back(lo, eval(f, lo));
  if (auto st = f.as_step()) {
    for (std::size_t i = 0; i < st->breakpoints.size(); ++i) {
      const Rat& b = st->breakpoints[i];
      if (b > lo && b < hi) out.emplace_back(b, st->values[i + 1]);
    }
    return out;
  }
  if (auto pr = f.as_periodic()) {
    Int k = floor_int(lo / pr->period);
    for (Rat base = Rat(k) * pr->period; base < hi; base += pr->period) {
      for (std::size_t i = 0; i < pr->kernel.starts.size(); ++i) {
        Rat s = base + pr->kernel.starts[i];
        if (s > lo && s < hi) out.emplace_back(s, pr->kernel.values[i]);
      }
    }
    return out;
  }
  const auto& lg = *f.as_log();
  if (lg.fixed_point >= lo && lg.fixed_point <= hi) {
    throw UnrepresentableError("log-periodic fixed point " + format_rat(lg.fixed_point) +
                               " lies in the window [" + format_rat(lo) + ", " + format_rat(hi) + "]");
  }
  Rat ulo = lo - lg.fixed_point;
  Rat uhi = hi - lg.fixed_point;
  auto jumps = ulo > 0 ? side_jumps(lg.plus, lg.ratio, BandKind::plus, ulo, uhi)
                       : side_jumps(lg.minus, lg.ratio, BandKind::minus, ulo, uhi);
  for (auto& [u, v] : jumps) out.emplace_back(u + lg.fixed_point, std::move(v));
  return out;
}

namespace {

// The pieces of f on [lo, hi) read as a cyclic pattern on the given band, where
// `to_band` maps an absolute point of the window to band coordinates.
template <class ToBand>
Pattern pattern_from_window(const Scenario& f, const Rat& lo, const Rat& hi, ToBand to_band) {
  std::vector<Rat> starts;
  std::vector<State> values;
  for (auto& [s, v] : pieces_in(f, lo, hi)) {
    starts.push_back(to_band(s));
    values.push_back(std::move(v));
  }
  return Pattern{std::move(starts), std::move(values)};
}

}  // namespace

Scenario periodic_extension(const Scenario& f, const Rat& x, const Rat& b) {
  if (!is_past_periodic(f, x, b)) {
    throw PreconditionError("scenario is not past-periodic below " + format_rat(x) + " with period " + format_rat(b));
  }
  Rat period = abs_rat(b);
  // Every class y + period*Z meets [x - period, x) exactly once.
  Pattern k = pattern_from_window(f, x - period, x, [&](const Rat& s) { return mod_pos(s, period); });
  return Scenario::periodic(period, std::move(k.starts), std::move(k.values));
}

Scenario affine_extension(const Scenario& f, const Rat& x, const AffineWarp& t) {
  if (t.is_identity()) throw PreconditionError("affine extension needs a nonidentity warp");
  if (!restrict_eq(f, compose_warp(f, t), x)) {
    throw PreconditionError("scenario is not past-invariant below " + format_rat(x) + " under " + t.str());
  }
  if (t.slope() == 1) return periodic_extension(f, x, t.offset());

  Rat p = std::get<Rat>(fixed_point(t));
  Rat ratio = t.slope() > 1 ? t.slope() : Rat(Rat(1) / t.slope());
  Band mband{BandKind::minus, ratio};
  Band pband{BandKind::plus, ratio};
  auto to_minus = [&](const Rat& s) { return mband.reduce(s - p); };
  auto to_plus = [&](const Rat& s) { return pband.reduce(s - p); };

  Pattern minus, plus;
  State at_fixed;
  if (x <= p) {
    // Only orbits left of p are visible; fill p and the right side with the
    // value f takes just below x.
    Rat d = x - p;
    Rat lo = d < 0 ? p + ratio * d : p - ratio;
    Rat hi = d < 0 ? x : p - 1;
    minus = pattern_from_window(f, lo, hi, to_minus);
    at_fixed = minus.values.back();  // window order, so this is f just below hi
    plus = Pattern::constant(at_fixed);
  } else {
    Rat d = x - p;
    minus = pattern_from_window(f, p - ratio, p - 1, to_minus);
    at_fixed = eval(f, p);
    plus = pattern_from_window(f, p + d / ratio, x, to_plus);
  }
  Scenario g = Scenario::log_periodic(p, ratio, std::move(minus), std::move(at_fixed), std::move(plus));
  if (!(compose_warp(g, t) == g) || !restrict_eq(f, g, x)) {
    throw std::logic_error("affine_extension produced a function violating its contract: " + g.str());
  }
  return g;
}

Rat orbit(const AffineWarp& t, const Rat& y, long n) {
  if (t.slope() == 1) return y + Rat(n) * t.offset();
  Rat p = t.offset() / (Rat(1) - t.slope());
  return pow_int(t.slope(), n) * (y - p) + p;
}

bool check_period_match(const Scenario& f, const Rat& x, const Rat& b) {
  PeriodSet ps = periods_of(f);
  if (ps.kind == PeriodSet::Kind::none) throw PreconditionError("check_period_match needs a periodic scenario");
  if (!is_past_periodic(f, x, b)) throw PreconditionError("scenario is not past-periodic with the given period");
  return ps.contains(b);
}

PastView::PastView(const Scenario& f, const Rat& cut)
    : shifted_(compose_warp(f, AffineWarp::shift(cut))), cut_(cut) {}

PastView past_view(const Scenario& f, const Rat& x) { return PastView(f, x); }

}  // namespace anonlab
