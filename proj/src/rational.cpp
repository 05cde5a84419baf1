#include "anonlab/rational.hpp"

#include <cmath>
#include <gmp.h>

namespace anonlab {

namespace mp = boost::multiprecision;

namespace {

Int parse_int(std::string_view s, std::string_view whole) {
  if (s.empty()) throw ParseError("empty integer in rational '" + std::string(whole) + "'");
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) throw ParseError("bad rational '" + std::string(whole) + "'");
  for (std::size_t j = i; j < s.size(); ++j) {
    if (s[j] < '0' || s[j] > '9') throw ParseError("bad rational '" + std::string(whole) + "'");
  }
  std::string digits(s.substr(s[0] == '+' ? 1 : 0));
  return Int(digits);
}

}  // namespace

Rat parse_rat(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s.empty()) throw ParseError("empty rational");

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Int num = parse_int(s.substr(0, slash), text);
    Int den = parse_int(s.substr(slash + 1), text);
    if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    return Rat(num, den);
  }
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view ip = s.substr(0, dot);
    std::string_view fp = s.substr(dot + 1);
    bool neg = !ip.empty() && ip[0] == '-';
    if (!ip.empty() && (ip[0] == '-' || ip[0] == '+')) ip.remove_prefix(1);
    if (ip.empty()) ip = "0";
    if (fp.empty()) fp = "0";
    if (fp[0] == '-' || fp[0] == '+') throw ParseError("bad decimal '" + std::string(text) + "'");
    Int whole = parse_int(ip, text);
    Int frac = parse_int(fp, text);
    Int scale = mp::pow(Int(10), static_cast<unsigned>(fp.size()));
    Rat r = Rat(whole) + Rat(frac, scale);
    return neg ? Rat(-r) : r;
  }
  return Rat(parse_int(s, text));
}

std::string format_rat(const Rat& r) {
  return mp::numerator(r).str() + "/" + mp::denominator(r).str();
}

Int floor_int(const Rat& r) {
  Int q;
  mpz_fdiv_q(q.backend().data(), mp::numerator(r).backend().data(),
             mp::denominator(r).backend().data());
  return q;
}

Rat mod_pos(const Rat& x, const Rat& m) {
  Rat q = x / m;
  return x - Rat(floor_int(q)) * m;
}

Rat pow_int(const Rat& r, long n) {
  if (n == 0) return Rat(1);
  if (n < 0) {
    if (r == 0) throw std::domain_error("pow_int: zero to a negative power");
    return pow_int(Rat(1) / r, -n);
  }
  Int num = mp::pow(mp::numerator(r), static_cast<unsigned>(n));
  Int den = mp::pow(mp::denominator(r), static_cast<unsigned>(n));
  return Rat(num, den);
}

std::optional<Rat> rational_root(const Rat& r, unsigned d) {
  if (r <= 0 || d == 0) return std::nullopt;
  if (d == 1) return r;
  Int num_root, den_root;
  int exact_num = mpz_root(num_root.backend().data(), mp::numerator(r).backend().data(), d);
  int exact_den = mpz_root(den_root.backend().data(), mp::denominator(r).backend().data(), d);
  if (!exact_num || !exact_den) return std::nullopt;
  return Rat(num_root, den_root);
}

double log2_abs(const Rat& r) {
  Int num = mp::abs(mp::numerator(r));
  const Int& den = mp::denominator(r);
  long en = 0, ed = 0;
  double mn = mpz_get_d_2exp(&en, num.backend().data());
  double md = mpz_get_d_2exp(&ed, den.backend().data());
  return std::log2(mn / md) + static_cast<double>(en - ed);
}

double to_double(const Rat& r) { return r.convert_to<double>(); }

}  // namespace anonlab
