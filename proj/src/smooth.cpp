#include "anonlab/smooth.hpp"

#include <algorithm>

namespace anonlab {

BigFloat h(const BigFloat& x) {
  if (x <= 0) return BigFloat(0);
  return exp(BigFloat(-1) / x);
}

std::vector<Int> h_deriv_poly(unsigned k) {
  if (k == 0) throw std::invalid_argument("h_deriv_poly needs k >= 1");
  std::vector<Int> r{0, 0, 1};
  for (unsigned step = 1; step < k; ++step) {
    // u^2 (R - R')
    std::vector<Int> d(r.size(), Int(0));
    for (std::size_t j = 0; j < r.size(); ++j) {
      d[j] += r[j];
      if (j > 0) d[j - 1] -= Int(static_cast<long>(j)) * r[j];
    }
    std::vector<Int> next(d.size() + 2, Int(0));
    for (std::size_t j = 0; j < d.size(); ++j) next[j + 2] = d[j];
    while (next.size() > 1 && next.back() == 0) next.pop_back();
    r = std::move(next);
  }
  return r;
}

BigFloat eval_poly(const std::vector<Int>& coeffs, const BigFloat& u) {
  BigFloat acc(0);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * u + BigFloat(*it);
  return acc;
}

Jet Jet::constant(const BigFloat& v, unsigned order) {
  std::vector<BigFloat> c(order + 1, BigFloat(0));
  c[0] = v;
  return Jet(std::move(c));
}

Jet Jet::variable(const BigFloat& x0, unsigned order) {
  Jet j = constant(x0, order);
  if (order >= 1) j.c_[1] = 1;
  return j;
}

BigFloat Jet::derivative(unsigned j) const {
  BigFloat f(1);
  for (unsigned i = 2; i <= j; ++i) f *= i;
  return c_.at(j) * f;
}

namespace {

void same_order(const Jet& a, const Jet& b) {
  if (a.order() != b.order()) throw std::invalid_argument("jets of different order");
}

}  // namespace

Jet operator+(const Jet& a, const Jet& b) {
  same_order(a, b);
  std::vector<BigFloat> c(a.c_.size());
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = a.c_[j] + b.c_[j];
  return Jet(std::move(c));
}

Jet operator-(const Jet& a, const Jet& b) {
  same_order(a, b);
  std::vector<BigFloat> c(a.c_.size());
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = a.c_[j] - b.c_[j];
  return Jet(std::move(c));
}

Jet operator*(const Jet& a, const Jet& b) {
  same_order(a, b);
  std::vector<BigFloat> c(a.c_.size(), BigFloat(0));
  for (std::size_t n = 0; n < c.size(); ++n) {
    for (std::size_t i = 0; i <= n; ++i) c[n] += a.c_[i] * b.c_[n - i];
  }
  return Jet(std::move(c));
}

Jet operator/(const Jet& a, const Jet& b) {
  same_order(a, b);
  if (b.c_[0] == 0) throw std::domain_error("jet division by a series vanishing at the base point");
  std::vector<BigFloat> q(a.c_.size(), BigFloat(0));
  for (std::size_t n = 0; n < q.size(); ++n) {
    BigFloat acc = a.c_[n];
    for (std::size_t i = 1; i <= n; ++i) acc -= b.c_[i] * q[n - i];
    q[n] = acc / b.c_[0];
  }
  return Jet(std::move(q));
}

Jet h_jet(const BigFloat& x, unsigned order) {
  if (x <= 0) return Jet::constant(BigFloat(0), order);
  BigFloat e = h(x);
  BigFloat u = BigFloat(1) / x;
  std::vector<BigFloat> c(order + 1);
  c[0] = e;
  BigFloat fact(1);
  for (unsigned j = 1; j <= order; ++j) {
    fact *= j;
    c[j] = e * eval_poly(h_deriv_poly(j), u) / fact;
  }
  return Jet(std::move(c));
}

namespace {

void check_unit(const BigFloat& x) {
  if (x < 0 || x > 1) throw DomainError("s is defined on [0, 1], got " + to_decimal(x));
}

}  // namespace

BigFloat s(const BigFloat& x) {
  check_unit(x);
  BigFloat a = h(x);
  BigFloat b = h(BigFloat(1) - x);
  return a / (a + b);
}

Jet s_jet(const BigFloat& x, unsigned order) {
  check_unit(x);
  if (x == 0) return Jet::constant(BigFloat(0), order);
  if (x == 1) return Jet::constant(BigFloat(1), order);
  Jet a = h_jet(x, order);
  // h(1 - x): the j-th coefficient picks up (-1)^j.
  Jet r = h_jet(BigFloat(1) - x, order);
  std::vector<BigFloat> c = r.coeffs();
  for (std::size_t j = 1; j < c.size(); j += 2) c[j] = -c[j];
  return a / (a + Jet(std::move(c)));
}

TransitionFn::TransitionFn(Point a_, Point b_) : a(std::move(a_)), b(std::move(b_)) {
  if (!(a.p < b.p && a.q < b.q)) {
    throw std::invalid_argument("transition needs B above and to the right of A");
  }
}

namespace {

// Position of x inside [A.p, B.p] rescaled to [0, 1].
BigFloat unit_position(const TransitionFn& t, const BigFloat& x) {
  BigFloat lo = to_big(t.a.p), hi = to_big(t.b.p);
  if (x < lo || x > hi) {
    throw DomainError("x = " + to_decimal(x) + " outside [" + format_rat(t.a.p) + ", " + format_rat(t.b.p) + "]");
  }
  BigFloat u = (x - lo) / to_big(t.b.p - t.a.p);
  return std::clamp(u, BigFloat(0), BigFloat(1));
}

// (q2 - q1) / (p2 - p1)^k, exact before rounding.
BigFloat chain_factor(const TransitionFn& t, unsigned k) {
  return to_big((t.b.q - t.a.q) / pow_int(t.b.p - t.a.p, static_cast<long>(k)));
}

}  // namespace

BigFloat s_ab(const TransitionFn& t, const BigFloat& x) {
  BigFloat u = unit_position(t, x);
  if (u == 0) return to_big(t.a.q);
  if (u == 1) return to_big(t.b.q);
  return to_big(t.b.q - t.a.q) * s(u) + to_big(t.a.q);
}

BigFloat s_ab_deriv(const TransitionFn& t, const BigFloat& x, unsigned k) {
  if (k == 0) return s_ab(t, x);
  BigFloat u = unit_position(t, x);
  return chain_factor(t, k) * s_jet(u, k).derivative(k);
}

DerivBound max_deriv_bound(unsigned k, unsigned grid_depth) {
  DerivBound b;
  b.k = k;
  b.grid_depth = grid_depth;
  b.grid_max = 0;
  const long n = 1L << grid_depth;
  for (long j = 0; j <= n; ++j) {
    BigFloat u = BigFloat(j) / BigFloat(n);
    BigFloat v = k == 0 ? s(u) : s_jet(u, k).derivative(k);
    b.grid_max = std::max(b.grid_max, BigFloat(abs(v)));
  }
  return b;
}

SmoothWarpSpec build_warp(const Rat& w, const Rat& z, unsigned depth) {
  if (depth < 2) throw std::invalid_argument("warp depth must be at least 2");
  SmoothWarpSpec spec;
  spec.w = w;
  spec.z = z;
  spec.depth = depth;
  spec.first_index = -3;
  const long n = static_cast<long>(depth);
  auto p_of = [&](long i) { return w - Rat(1, i + 2); };
  const Rat p0 = p_of(0);
  const Rat q0 = z - Rat(1, 2);
  for (long i = spec.first_index; i <= n + 1; ++i) {
    if (i < 0) {
      spec.ps.push_back(p0 + i);
      spec.qs.push_back(q0 + i);
    } else if (i == 0) {
      spec.ps.push_back(p0);
      spec.qs.push_back(q0);
    } else {
      Rat gap = p_of(i + 1) - p_of(i);
      spec.ps.push_back(p_of(i));
      spec.qs.push_back(z - pow_int(gap, i) / Rat(2 * i));
    }
  }
  for (std::size_t j = 1; j < spec.ps.size(); ++j) {
    if (!(spec.ps[j - 1] < spec.ps[j] && spec.qs[j - 1] < spec.qs[j])) {
      throw std::logic_error("generated warp anchors are not increasing");
    }
  }
  if (!(spec.ps.back() < w && spec.qs.back() < z && p0 > w - 1)) {
    throw std::logic_error("generated warp anchors leave their bounds");
  }
  if (!pq_bound_failures(spec).empty()) throw std::logic_error("generated warp breaks the q-gap bound");
  return spec;
}

std::vector<long> pq_bound_failures(const SmoothWarpSpec& spec) {
  std::vector<long> out;
  for (long i = 1; i < static_cast<long>(spec.depth); ++i) {
    Rat gi = pow_int(spec.p(i + 1) - spec.p(i), i);
    bool ok = (spec.q(i + 1) - spec.q(i)) / gi < Rat(1, i) && spec.z - spec.q(i) < gi / Rat(i);
    if (!ok) out.push_back(i);
  }
  return out;
}

TransitionFn piece_at(const SmoothWarpSpec& spec, const BigFloat& x) {
  const BigFloat w = to_big(spec.w);
  if (x >= w) {
    long n = static_cast<long>(floor(x - w));
    return TransitionFn(spec.right_anchor(n), spec.right_anchor(n + 1));
  }
  const BigFloat p0 = to_big(spec.p(0));
  if (x < p0) {
    long n = static_cast<long>(floor(x - p0));
    return TransitionFn({spec.p(0) + n, spec.q(0) + n}, {spec.p(0) + n + 1, spec.q(0) + n + 1});
  }
  const long last = spec.last_index();
  for (long i = 0; i < last; ++i) {
    if (x < to_big(spec.p(i + 1))) return TransitionFn(spec.anchor(i), spec.anchor(i + 1));
  }
  throw DomainError("x = " + to_decimal(x) + " lies in [p_" + std::to_string(last) + ", w), past the truncation");
}

BigFloat warp_eval(const SmoothWarpSpec& spec, const BigFloat& x) { return s_ab(piece_at(spec, x), x); }

bool FlatnessReport::passed() const {
  return violations.empty() && pq_failures.empty() && left_trend_ok && right_flat && monotone && seams_flat;
}

FlatnessReport verify_flatness(const SmoothWarpSpec& spec, unsigned kmax, unsigned samples_per_piece,
                               unsigned grid_depth) {
  if (kmax < 1) throw std::invalid_argument("verify_flatness needs kmax >= 1");
  if (samples_per_piece < 2) throw std::invalid_argument("verify_flatness needs at least 2 samples per piece");
  FlatnessReport r;
  r.kmax = kmax;
  r.precision_bits = working_precision_bits();
  r.samples_per_piece = samples_per_piece;
  for (unsigned k = 1; k <= kmax; ++k) r.bounds.push_back(max_deriv_bound(k, grid_depth));
  r.pq_failures = pq_bound_failures(spec);

  // Left pieces, then two unit pieces to the right of w.
  std::vector<TransitionFn> chain;
  std::vector<long> index;
  for (long i = spec.first_index; i < spec.last_index(); ++i) {
    chain.emplace_back(spec.anchor(i), spec.anchor(i + 1));
    index.push_back(i);
  }
  const std::size_t n_left = chain.size();
  for (long i = 0; i < 2; ++i) {
    chain.emplace_back(spec.right_anchor(i), spec.right_anchor(i + 1));
    index.push_back(i);
  }

  r.monotone = true;
  BigFloat prev;
  bool have_prev = false;
  for (std::size_t c = 0; c < chain.size(); ++c) {
    const TransitionFn& t = chain[c];
    const long i = index[c];
    FlatnessReport::Piece piece{i, std::vector<BigFloat>(kmax, BigFloat(0)), {}};
    for (unsigned j = 0; j <= samples_per_piece; ++j) {
      Rat u(static_cast<long>(j), static_cast<long>(samples_per_piece));
      BigFloat x = to_big(t.a.p + u * (t.b.p - t.a.p));
      BigFloat value = j == 0 ? to_big(t.a.q) : j == samples_per_piece ? to_big(t.b.q) : s_ab(t, x);
      if (have_prev && (j > 0 ? !(prev < value) : prev > value)) {
        r.monotone = false;
        r.violations.push_back({i, 0, "warp fails to increase at sample " + std::to_string(j)});
      }
      prev = value;
      have_prev = true;
      Jet jet = s_jet(to_big(u), kmax);
      for (unsigned k = 1; k <= kmax; ++k) {
        BigFloat d = abs(BigFloat(jet.derivative(k) * chain_factor(t, k)));
        piece.max_abs_deriv[k - 1] = std::max(piece.max_abs_deriv[k - 1], d);
      }
    }
    if (c < n_left && i >= 1) {
      for (unsigned k = 1; k <= kmax && static_cast<long>(k) <= i; ++k) {
        BigFloat limit = r.bounds[k - 1].bound() / BigFloat(i);
        piece.margin.push_back(limit - piece.max_abs_deriv[k - 1]);
        if (!(piece.max_abs_deriv[k - 1] < limit)) {
          r.violations.push_back({i, k, "sampled derivative reaches M_k / i"});
        }
      }
    }
    r.pieces.push_back(std::move(piece));
    if (c + 1 == n_left) {
      // The left pieces end at q_{N+1} < z = t(w).
      if (!(prev < to_big(spec.z))) {
        r.monotone = false;
        r.violations.push_back({i, 0, "last left anchor not below z"});
      }
    }
  }

  // Both one-sided jets at every seam and at w from the right.
  r.seams_flat = true;
  for (const TransitionFn& t : chain) {
    Jet lo = s_jet(BigFloat(0), kmax), hi = s_jet(BigFloat(1), kmax);
    for (unsigned k = 1; k <= kmax; ++k) {
      if (lo.derivative(k) * chain_factor(t, k) != 0 || hi.derivative(k) * chain_factor(t, k) != 0) {
        r.seams_flat = false;
      }
    }
  }
  r.right_flat = true;
  for (unsigned k = 1; k <= kmax; ++k) {
    if (s_ab_deriv(chain[n_left], to_big(spec.w), k) != 0) r.right_flat = false;
  }
  if (!r.seams_flat) r.violations.push_back({0, 0, "nonzero one-sided derivative at a seam"});
  if (!r.right_flat) r.violations.push_back({0, 0, "nonzero right derivative at w"});

  std::vector<Rat> quotients;
  for (long i = 0; i <= spec.last_index(); ++i) {
    quotients.push_back((spec.z - spec.q(i)) / (spec.w - spec.p(i)));
    r.left_quotients.push_back(to_big(quotients.back()));
  }
  const long n = static_cast<long>(spec.depth);
  r.left_trend_ok = n >= 4;
  const Rat eps(Int(1), pow(Int(10), 20));
  for (long i = n - 4; i <= n && r.left_trend_ok; ++i) {
    if (!(quotients[i] < eps)) r.left_trend_ok = false;
    if (i > n - 4 && !(quotients[i] < quotients[i - 1])) r.left_trend_ok = false;
  }
  return r;
}

}  // namespace anonlab
