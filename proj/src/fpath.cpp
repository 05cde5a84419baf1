#include "anonlab/fpath.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace anonlab {

namespace {

bool inside(const BigFloat& x, const Rat& lo, const Rat& hi, const BigFloat& slack) {
  return x >= to_big(lo) - slack && x <= to_big(hi) + slack;
}

BigFloat clamp_to(const BigFloat& x, const Rat& lo, const Rat& hi) {
  return std::clamp(x, to_big(lo), to_big(hi));
}

BigFloat invert_transition(const TransitionFn& t, const BigFloat& y) {
  BigFloat lo = to_big(t.a.p), hi = to_big(t.b.p);
  if (y <= to_big(t.a.q)) return lo;
  if (y >= to_big(t.b.q)) return hi;
  const unsigned steps = working_precision_bits() + 8;
  for (unsigned i = 0; i < steps; ++i) {
    BigFloat mid = (lo + hi) / 2;
    if (mid == lo || mid == hi) break;
    if (s_ab(t, mid) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return (lo + hi) / 2;
}

}  // namespace

BigFloat f_apply(const FMove& m, const BigFloat& x) {
  TransitionFn t = m.elem.fn();
  if (m.dir == Direction::forward) return s_ab(t, x);
  if (x < to_big(t.a.q) || x > to_big(t.b.q)) {
    throw DomainError("inverse move needs x in [" + format_rat(t.a.q) + ", " + format_rat(t.b.q) + "]");
  }
  return invert_transition(t, x);
}

bool verify_witness(const FPathWitness& wit, const BigFloat& tol) {
  if (wit.points.empty() || wit.points.size() != wit.moves.size() + 1) return false;
  for (std::size_t i = 0; i < wit.moves.size(); ++i) {
    const FMove& m = wit.moves[i];
    TransitionFn t = m.elem.fn();
    const bool fwd = m.dir == Direction::forward;
    const BigFloat& in = fwd ? wit.points[i] : wit.points[i + 1];
    const BigFloat& out = fwd ? wit.points[i + 1] : wit.points[i];
    if (!inside(in, t.a.p, t.b.p, tol) || !inside(out, t.a.q, t.b.q, tol)) return false;
    if (abs(BigFloat(s_ab(t, clamp_to(in, t.a.p, t.b.p)) - out)) > tol) return false;
  }
  return true;
}

FPathWitness reverse_witness(const FPathWitness& wit) {
  FPathWitness r;
  r.points.assign(wit.points.rbegin(), wit.points.rend());
  for (auto it = wit.moves.rbegin(); it != wit.moves.rend(); ++it) {
    r.moves.push_back({it->elem, it->dir == Direction::forward ? Direction::inverse : Direction::forward});
  }
  return r;
}

FPathWitness concat_witnesses(const FPathWitness& w1, const FPathWitness& w2, const BigFloat& tol) {
  if (w1.points.empty() || w2.points.empty()) throw std::invalid_argument("empty witness");
  if (abs(BigFloat(w1.points.back() - w2.points.front())) > tol) {
    throw std::invalid_argument("witness endpoints differ: " + to_decimal(w1.points.back()) + " vs " +
                                to_decimal(w2.points.front()));
  }
  FPathWitness r = w1;
  r.points.insert(r.points.end(), w2.points.begin() + 1, w2.points.end());
  r.moves.insert(r.moves.end(), w2.moves.begin(), w2.moves.end());
  return r;
}

std::vector<FElement> enumerate_f(unsigned bound) {
  if (bound < 1) throw std::invalid_argument("enumerate_f needs bound >= 1");
  std::set<Rat> vals;
  const long b = static_cast<long>(bound);
  for (long d = 1; d <= b; ++d) {
    for (long n = -b; n <= b; ++n) vals.insert(Rat(n, d));
  }
  std::vector<Rat> v(vals.begin(), vals.end());
  std::vector<FElement> out;
  for (const Rat& p1 : v) {
    for (const Rat& q1 : v) {
      for (const Rat& p2 : v) {
        if (!(p1 < p2)) continue;
        for (const Rat& q2 : v) {
          if (q1 < q2) out.push_back({{p1, q1}, {p2, q2}});
        }
      }
    }
  }
  return out;
}

FPathWitness witness_for_warp(const SmoothWarpSpec& spec, const BigFloat& x) {
  if (x >= to_big(spec.w)) throw DomainError("witness_for_warp covers only x < w");
  TransitionFn t = piece_at(spec, x);
  FPathWitness wit;
  wit.points = {x, s_ab(t, x)};
  wit.moves = {{FElement{t.a, t.b}, Direction::forward}};
  return wit;
}

std::optional<FPathWitness> search_path(const BigFloat& x, const BigFloat& y, const std::vector<FElement>& elems,
                                        unsigned max_moves, const BigFloat& tol, std::size_t max_frontier) {
  std::vector<FPathWitness> level{FPathWitness{{x}, {}}};
  if (abs(BigFloat(x - y)) <= tol) return level.front();
  for (unsigned depth = 0; depth < max_moves; ++depth) {
    std::vector<FPathWitness> next;
    for (const auto& wit : level) {
      const BigFloat& cur = wit.points.back();
      for (const FElement& e : elems) {
        for (Direction d : {Direction::forward, Direction::inverse}) {
          const bool fwd = d == Direction::forward;
          if (!inside(cur, fwd ? e.a.p : e.a.q, fwd ? e.b.p : e.b.q, BigFloat(0))) continue;
          BigFloat img = f_apply({e, d}, cur);
          if (abs(BigFloat(img - cur)) <= tol) continue;
          FPathWitness ext = wit;
          ext.points.push_back(img);
          ext.moves.push_back({e, d});
          if (abs(BigFloat(img - y)) <= tol) return ext;
          if (next.size() < max_frontier) next.push_back(std::move(ext));
        }
      }
    }
    if (next.empty()) break;
    level = std::move(next);
  }
  return std::nullopt;
}

nlohmann::json to_json(const FPathWitness& wit) {
  nlohmann::json j;
  j["points"] = nlohmann::json::array();
  for (const auto& x : wit.points) j["points"].push_back(to_decimal(x));
  j["moves"] = nlohmann::json::array();
  for (const auto& m : wit.moves) {
    j["moves"].push_back({{"A", {format_rat(m.elem.a.p), format_rat(m.elem.a.q)}},
                          {"B", {format_rat(m.elem.b.p), format_rat(m.elem.b.q)}},
                          {"direction", m.dir == Direction::forward ? "forward" : "inverse"}});
  }
  return j;
}

FPathWitness witness_from_json(const nlohmann::json& j) {
  FPathWitness wit;
  for (const auto& p : j.at("points")) wit.points.emplace_back(p.get<std::string>());
  for (const auto& m : j.at("moves")) {
    auto pt = [](const nlohmann::json& a) {
      return Point{parse_rat(a.at(0).get<std::string>()), parse_rat(a.at(1).get<std::string>())};
    };
    std::string dir = m.at("direction").get<std::string>();
    if (dir != "forward" && dir != "inverse") throw ParseError("unknown move direction '" + dir + "'");
    FElement e{pt(m.at("A")), pt(m.at("B"))};
    e.fn();  // validates the orientation
    wit.moves.push_back({e, dir == "forward" ? Direction::forward : Direction::inverse});
  }
  return wit;
}

}  // namespace anonlab
