#include "anonlab/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace anonlab {

namespace {

// Shape of the past y < 0 of a scenario h (the cut already moved to 0).
struct PastShape {
  enum class Kind { constant, steps, periodic, log_left, log_full };
  Kind kind = Kind::constant;
  std::vector<Rat> jumps;     // steps: visible breakpoints
  std::vector<State> values;  // steps: jumps.size() + 1 values; constant: one value
};

PastShape past_shape(const Scenario& h) {
  PastShape s;
  if (auto st = h.as_step()) {
    s.values.push_back(st->values.front());
    for (std::size_t i = 0; i < st->breakpoints.size() && st->breakpoints[i] < 0; ++i) {
      s.jumps.push_back(st->breakpoints[i]);
      s.values.push_back(st->values[i + 1]);
    }
    s.kind = s.jumps.empty() ? PastShape::Kind::constant : PastShape::Kind::steps;
    return s;
  }
  if (h.as_periodic()) {
    s.kind = PastShape::Kind::periodic;
    return s;
  }
  const auto& lg = *h.as_log();
  if (lg.fixed_point < 0) {
    s.kind = PastShape::Kind::log_full;
  } else if (lg.minus.is_constant()) {
    s.kind = PastShape::Kind::constant;
    s.values.push_back(lg.minus.values.front());
  } else {
    s.kind = PastShape::Kind::log_left;
  }
  return s;
}

// a0 * ratio^n with n chosen to bring it as close to 1 as possible.
Rat nearest_to_one(const Rat& a0, const Rat& ratio) {
  double est = -log2_abs(a0) / std::log2(to_double(ratio));
  long n0 = static_cast<long>(std::lround(est));
  Rat best = a0 * pow_int(ratio, n0);
  for (long n = n0 - 2; n <= n0 + 2; ++n) {
    Rat cand = a0 * pow_int(ratio, n);
    if (abs_rat(cand - 1) < abs_rat(best - 1)) best = cand;
  }
  return best;
}

using Key = std::tuple<Rat, Rat, Rat, Rat>;

Key tie_key(const AffineWarp& t) {
  return {abs_rat(t.slope() - 1), abs_rat(t.offset()), t.slope(), t.offset()};
}

// Slopes aligning the first jump of an observed log side with each jump of g's side.
std::vector<Rat> aligned_slopes(const Pattern& observed, const Pattern& target, const Rat& ratio) {
  std::vector<Rat> out;
  const Rat& sigma = observed.starts.front();
  for (const Rat& k : target.starts) out.push_back(nearest_to_one(k / sigma, ratio));
  return out;
}

// Candidate warps t (cut at 0) for which g ∘ t might reproduce the past of h.
// Complete: if any warp works, one of the candidates below works, and for the
// continuous families the tie-break optimum is among them.
std::vector<AffineWarp> candidate_warps(const Scenario& g, const Scenario& h, const PastShape& past) {
  using K = PastShape::Kind;
  std::vector<AffineWarp> out;

  if (auto st = g.as_step()) {
    const auto& beta = st->breakpoints;
    const auto& v = st->values;
    if (past.kind == K::constant) {
      if (v.front() != past.values.front()) return out;
      // Any slope; the offset must keep every jump of g at or beyond the cut.
      Rat c = beta.empty() ? Rat(0) : std::min(Rat(0), beta.front());
      out.emplace_back(Rat(1), c);
    } else if (past.kind == K::steps) {
      std::size_t k = past.jumps.size();
      if (beta.size() < k) return out;
      for (std::size_t i = 0; i <= k; ++i) {
        if (v[i] != past.values[i]) return out;
      }
      const Rat& j1 = past.jumps[0];
      if (k == 1) {
        // a*j1 + c = beta1 and c <= beta2: any slope up to (beta2 - beta1)/|j1|.
        Rat a(1);
        if (beta.size() >= 2) a = std::min(a, Rat((beta[1] - beta[0]) / -j1));
        out.emplace_back(a, beta[0] - a * j1);
      } else {
        Rat a = (beta[1] - beta[0]) / (past.jumps[1] - j1);
        out.emplace_back(a, beta[0] - a * j1);
      }
    }
    return out;
  }

  if (auto pr = g.as_periodic()) {
    auto hp = h.as_periodic();
    if (past.kind != K::periodic || !hp) return out;
    Rat a = pr->period / hp->period;
    const Rat& sigma = hp->kernel.starts.front();
    for (const Rat& k : pr->kernel.starts) {
      Rat c0 = mod_pos(k - a * sigma, pr->period);
      Rat c1 = c0 - pr->period;
      out.emplace_back(a, abs_rat(c1) < abs_rat(c0) ? c1 : c0);
    }
    return out;
  }

  const auto& lg = *g.as_log();
  if (past.kind == K::constant) {
    if (!lg.minus.is_constant() || lg.minus.values.front() != past.values.front()) return out;
    // The fixed point of g ∘ t must sit at or beyond the cut: c <= p_g.
    out.emplace_back(Rat(1), std::min(Rat(0), lg.fixed_point));
    return out;
  }
  if (past.kind != K::log_left && past.kind != K::log_full) return out;
  const auto& hl = *h.as_log();
  std::vector<Rat> slopes;
  if (!hl.minus.is_constant()) {
    if (lg.minus.is_constant()) return out;
    slopes = aligned_slopes(hl.minus, lg.minus, lg.ratio);
  } else if (!hl.plus.is_constant()) {
    if (lg.plus.is_constant()) return out;
    slopes = aligned_slopes(hl.plus, lg.plus, lg.ratio);
  } else {
    slopes.push_back(Rat(1));
  }
  for (const Rat& a : slopes) out.emplace_back(a, lg.fixed_point - a * hl.fixed_point);
  return out;
}

std::vector<AffineWarp> verified_sorted(const Scenario& g, const Scenario& h, std::vector<AffineWarp> cands) {
  std::vector<AffineWarp> ok;
  for (auto& t : cands) {
    if (restrict_eq(h, compose_warp(g, t), Rat(0))) ok.push_back(std::move(t));
  }
  std::sort(ok.begin(), ok.end(), [](const AffineWarp& l, const AffineWarp& r) { return tie_key(l) < tie_key(r); });
  ok.erase(std::unique(ok.begin(), ok.end()), ok.end());
  return ok;
}

// Warp relative to the cut (cut at 0) to absolute coordinates: t(y - cut).
AffineWarp to_absolute(const AffineWarp& local, const Rat& cut) {
  return compose(local, AffineWarp::shift(-cut));
}

// Every warp fits a constant entry; report the identity for it.
AffineWarp reported_warp(const Scenario& g, const AffineWarp& local, const Rat& cut) {
  if (auto st = g.as_step(); st && st->breakpoints.empty()) return AffineWarp();
  return to_absolute(local, cut);
}


std::vector<AffineWarp> local_consistent_warps(const Scenario& g, const Scenario& h, const PastShape& past) {
  return verified_sorted(g, h, candidate_warps(g, h, past));
}

Guess select_t2(const Catalog& cat, const PastView& pv) {
  const Scenario& h = pv.shifted();
  PastShape past = past_shape(h);
  for (std::size_t i = 0; i < cat.size(); ++i) {
    auto warps = local_consistent_warps(cat.entry(i), h, past);
    if (warps.empty()) continue;
    const AffineWarp& t = warps.front();
    return Guess{eval(cat.entry(i), t.offset()), i, reported_warp(cat.entry(i), t, pv.cut())};
  }
  throw NoConsistentEntry("no catalog entry is T2-consistent with the past at " + format_rat(pv.cut()));
}

}  // namespace

Tier tier_of(const Scenario& f) {
  if (periods_of(f).kind != PeriodSet::Kind::none) return Tier::periodic;
  if (f.as_log()) return Tier::affine_invariant;
  if (auto st = f.as_step(); st && st->breakpoints.size() == 1) return Tier::affine_invariant;
  return Tier::other;
}

std::string to_string(Tier t) {
  switch (t) {
    case Tier::periodic: return "periodic";
    case Tier::affine_invariant: return "affineInvariant";
    case Tier::other: return "other";
  }
  return "?";
}

std::string to_string(Mode m) { return m == Mode::ht ? "ht" : "t2"; }

Mode parse_mode(const std::string& s) {
  if (s == "ht") return Mode::ht;
  if (s == "t2") return Mode::t2;
  throw std::invalid_argument("unknown mode '" + s + "' (expected ht or t2)");
}

Catalog::Catalog(std::vector<Scenario> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (entries_[i] == entries_[j]) {
        throw std::invalid_argument("catalog entries " + std::to_string(j) + " and " + std::to_string(i) + " coincide");
      }
    }
    tiers_.push_back(tier_of(entries_[i]));
    if (i > 0 && tiers_[i] < tiers_[i - 1]) {
      throw std::invalid_argument("catalog entry " + std::to_string(i) + " (" + to_string(tiers_[i]) +
                                  ") follows a " + to_string(tiers_[i - 1]) + " entry");
    }
  }
}

void Catalog::certify(const std::vector<Rat>& cuts) {
  ClosureReport r = check_closure(*this, cuts);
  if (!r.passed()) {
    const auto& v = r.violations.front();
    throw ClosureViolation("catalog entry " + std::to_string(v.entry) + " is " + v.kind + " below " +
                           format_rat(v.cut) + " without a realizing entry: " + v.detail);
  }
  certified_ = true;
}

bool consistency_ht(const Scenario& g, const PastView& pv) {
  return restrict_eq(pv.shifted(), compose_warp(g, AffineWarp::shift(pv.cut())), Rat(0));
}

std::vector<AffineWarp> consistent_warps(const Scenario& g, const PastView& pv) {
  const Scenario& h = pv.shifted();
  auto local = local_consistent_warps(g, h, past_shape(h));
  std::vector<AffineWarp> out;
  for (const auto& t : local) out.push_back(reported_warp(g, t, pv.cut()));
  return out;
}

std::optional<AffineWarp> consistency_t2(const Scenario& g, const PastView& pv) {
  auto ws = consistent_warps(g, pv);
  if (ws.empty()) return std::nullopt;
  return ws.front();
}

Guess ht_predict(const Catalog& cat, const PastView& pv) {
  for (std::size_t i = 0; i < cat.size(); ++i) {
    if (consistency_ht(cat.entry(i), pv)) return Guess{eval(cat.entry(i), pv.cut()), i, AffineWarp()};
  }
  throw NoConsistentEntry("no catalog entry agrees with the past at " + format_rat(pv.cut()));
}

Guess t2_predict(const Catalog& cat, const PastView& pv) {
  if (!cat.closure_certified()) throw ClosureViolation("t2_predict needs a catalog certified by check_closure");
  return select_t2(cat, pv);
}

Guess t2_select(const Catalog& cat, const PastView& pv) { return select_t2(cat, pv); }

Guess predict(const Catalog& cat, const PastView& pv, Mode mode) {
  return mode == Mode::ht ? ht_predict(cat, pv) : select_t2(cat, pv);
}

namespace {

std::vector<Rat> structural_cuts(const Scenario& g) {
  std::vector<Rat> pts;
  if (auto st = g.as_step()) pts = st->breakpoints;
  if (auto lg = g.as_log()) pts.push_back(lg->fixed_point);
  std::vector<Rat> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    Rat next = i + 1 < pts.size() ? pts[i + 1] : pts[i] + 2;
    out.push_back(pts[i] - 1);
    out.push_back(pts[i]);
    out.push_back((pts[i] + next) / 2);
    out.push_back(pts[i] + 1);
  }
  return out;
}

}  // namespace

ClosureReport check_closure(const Catalog& cat, const std::vector<Rat>& cuts) {
  ClosureReport report;
  for (std::size_t i = 0; i < cat.size(); ++i) {
    if (cat.tier(i) == Tier::periodic) continue;
    const Scenario& g = cat.entry(i);
    std::vector<Rat> xs = cuts;
    for (auto& c : structural_cuts(g)) xs.push_back(std::move(c));
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    for (const Rat& x : xs) {
      PastView pv(g, x);
      PastShape past = past_shape(pv.shifted());
      // Within the three classes: a past is past-periodic exactly when it is
      // constant, and past-affine-invariant exactly when it is constant, has a
      // single visible jump, or is log-periodic.
      Tier needed;
      std::string kind;
      if (past.kind == PastShape::Kind::constant) {
        needed = Tier::periodic;
        kind = "past-periodic";
      } else if (past.kind == PastShape::Kind::steps && past.jumps.size() == 1 && cat.tier(i) == Tier::other) {
        needed = Tier::affine_invariant;
        kind = "past-affine-invariant";
      } else {
        continue;
      }
      ++report.checks;
      bool realized = false;
      for (std::size_t j = 0; j < cat.size() && !realized; ++j) {
        if (cat.tier(j) > needed) break;
        realized = consistency_t2(cat.entry(j), pv).has_value();
      }
      if (!realized) {
        report.violations.push_back({i, x, kind, "no " + to_string(needed) + " entry is consistent with " + g.str()});
      }
    }
  }
  return report;
}

EquivarianceReport equivariance_check(const Catalog& cat, const Scenario& f, const AffineWarp& t,
                                      const std::vector<Rat>& grid, Mode mode) {
  EquivarianceReport report;
  Scenario warped = compose_warp(f, t);
  for (const Rat& x : grid) {
    Guess lhs = predict(cat, PastView(warped, x), mode);
    Guess rhs = predict(cat, PastView(f, t(x)), mode);
    ++report.checked;
    if (lhs.state != rhs.state || lhs.witness_index != rhs.witness_index) {
      report.violations.push_back({x, lhs.state, rhs.state, lhs.witness_index, rhs.witness_index});
    }
  }
  return report;
}

ErrorSetReport error_set(const Catalog& cat, const Scenario& f, const std::vector<Rat>& grid, Mode mode) {
  ErrorSetReport r;
  for (const Rat& x : grid) {
    Guess gs = predict(cat, PastView(f, x), mode);
    State truth = eval(f, x);
    if (gs.state != truth) r.errors.push_back(r.agents.size());
    r.index_trace.push_back(gs.witness_index);
    r.agents.push_back(x);
    r.guesses.push_back(std::move(gs));
    r.truths.push_back(std::move(truth));
  }
  return r;
}

std::vector<std::string> error_set_violations(const ErrorSetReport& r, std::size_t catalog_size) {
  std::vector<std::string> out;
  std::vector<std::size_t> order(r.agents.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return r.agents[a] < r.agents[b]; });
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (r.index_trace[order[k]] < r.index_trace[order[k - 1]]) {
      out.push_back("witness index drops from " + std::to_string(r.index_trace[order[k - 1]]) + " to " +
                    std::to_string(r.index_trace[order[k]]) + " at agent " + format_rat(r.agents[order[k]]));
    }
  }
  std::vector<std::size_t> err = r.errors;
  std::sort(err.begin(), err.end(), [&](std::size_t a, std::size_t b) { return r.agents[a] < r.agents[b]; });
  for (std::size_t k = 1; k < err.size(); ++k) {
    if (!(r.index_trace[err[k - 1]] < r.index_trace[err[k]])) {
      out.push_back("erring agents " + format_rat(r.agents[err[k - 1]]) + " < " + format_rat(r.agents[err[k]]) +
                    " share or reverse witness indices " + std::to_string(r.index_trace[err[k - 1]]) + ", " +
                    std::to_string(r.index_trace[err[k]]));
    }
  }
  if (r.errors.size() > catalog_size) {
    out.push_back(std::to_string(r.errors.size()) + " erring agents exceed catalog size " + std::to_string(catalog_size));
  }
  return out;
}

bool WellDefinednessReport::agree() const {
  return std::all_of(guesses.begin(), guesses.end(), [&](const State& s) { return s == guesses.front(); });
}

WellDefinednessReport well_definedness_check(const Catalog& cat, const PastView& pv, std::size_t warp_samples) {
  Guess chosen = select_t2(cat, pv);
  const Scenario& g = cat.entry(chosen.witness_index);
  const Scenario& h = pv.shifted();
  auto base = local_consistent_warps(g, h, past_shape(h));

  // Symmetries of g on the left, perturbations of the past on the right.
  std::vector<AffineWarp> left{AffineWarp()};
  for (long k = -3; k <= 3; ++k) {
    if (k == 0) continue;
    if (auto pr = g.as_periodic()) left.push_back(AffineWarp::shift(Rat(k) * pr->period));
    if (auto lg = g.as_log()) left.push_back(AffineWarp::scale_about(pow_int(lg->ratio, k), lg->fixed_point));
    if (auto st = g.as_step()) {
      if (st->breakpoints.size() == 1) left.push_back(AffineWarp::scale_about(pow_int(Rat(2), k), st->breakpoints[0]));
      if (st->breakpoints.empty()) {
        left.push_back(AffineWarp::shift(Rat(k)));
        left.push_back(AffineWarp::scale(pow_int(Rat(2), k)));
      }
    }
  }
  std::vector<AffineWarp> right{AffineWarp()};
  for (long k = 1; k <= 4; ++k) right.push_back(AffineWarp::shift(Rat(-k, 2)));
  for (long k = -2; k <= 2; ++k) {
    if (k != 0) right.push_back(AffineWarp::scale(pow_int(Rat(2), k)));
  }

  std::vector<AffineWarp> pool;
  for (const auto& t0 : base) {
    for (const auto& l : left) {
      for (const auto& r : right) pool.push_back(compose(l, compose(t0, r)));
    }
  }
  auto ok = verified_sorted(g, h, std::move(pool));

  WellDefinednessReport report;
  report.index = chosen.witness_index;
  for (std::size_t i = 0; i < ok.size() && i < warp_samples; ++i) {
    report.guesses.push_back(eval(g, ok[i].offset()));
    report.warps.push_back(to_absolute(ok[i], pv.cut()));
  }
  return report;
}

}  // namespace anonlab
